#pragma once

// Shared natural-log algorithm for the scalar and AVX2 kernels.
//
// x = m * 2^e with m in [sqrt(1/2), sqrt(2)); with s = (m-1)/(m+1),
// log(m) = 2s * sum_k s^(2k)/(2k+1). |s| <= 0.1716, so twelve terms reach
// full double precision. ln 2 is split hi/lo so e*ln2 stays exact for
// |e| < 2^21.

#include <bit>
#include <cstdint>

namespace quadaudit::kernels::detail {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // high 32 bits of ln 2
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

inline constexpr int kPolyTerms = 12;
inline constexpr double kPoly[kPolyTerms] = {
    1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0,
};

inline constexpr std::uint64_t kMantissaMask = 0x000fffffffffffffULL;
inline constexpr std::uint64_t kExponentOne = 0x3ff0000000000000ULL;

// Smallest positive normal double; entropy treats anything below as zero.
inline constexpr double kMinNormal = 2.2250738585072014e-308;

inline double log_scalar(double x) noexcept {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const auto biased = static_cast<std::int64_t>((bits >> 52) & 0x7ff);
  double m = std::bit_cast<double>((bits & kMantissaMask) | kExponentOne);
  double e = static_cast<double>(biased) - 1023.0;
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double f = m - 1.0;
  const double s = f / (2.0 + f);
  const double z = s * s;
  double poly = kPoly[kPolyTerms - 1];
  for (int k = kPolyTerms - 2; k >= 0; --k) poly = poly * z + kPoly[k];
  const double r = (s + s) * poly;
  return e * kLn2Hi + (e * kLn2Lo + r);
}

inline double xlogx_scalar(double p) noexcept {
  const double safe = p >= kMinNormal ? p : 1.0;
  return p * log_scalar(safe);
}

inline double entropy_scalar(double p) noexcept {
  const double h = 0.0 - (xlogx_scalar(p) + xlogx_scalar(1.0 - p));
  return h < kLn2 ? h : kLn2;
}

inline double clamp_scalar(double x, double lo, double hi) noexcept {
  const double a = x > lo ? x : lo;
  return a < hi ? a : hi;
}

inline double kl_scalar(double p, double q, double eps, bool& clamped) noexcept {
  const double hi = 1.0 - eps;
  const double pc = clamp_scalar(p, eps, hi);
  const double qc = clamp_scalar(q, eps, hi);
  clamped = (pc != p) || (qc != q);
  const double a = pc * log_scalar(pc / qc);
  const double pn = 1.0 - pc;
  const double qn = 1.0 - qc;
  const double b = pn * log_scalar(pn / qn);
  const double sum = a + b;
  return sum > 0.0 ? sum : 0.0;
}

}  // namespace quadaudit::kernels::detail
