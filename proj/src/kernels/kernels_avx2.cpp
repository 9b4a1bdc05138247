#include <cassert>

#include "log_poly.hpp"
#include "quadaudit/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define QUADAUDIT_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define QUADAUDIT_HAVE_AVX2_KERNELS 0
#endif

namespace quadaudit::kernels::avx2 {

#if QUADAUDIT_HAVE_AVX2_KERNELS

#define QA_AVX2 __attribute__((target("avx2")))

namespace {

using detail::kPoly;
using detail::kPolyTerms;

// Lane-wise twin of detail::log_scalar.
QA_AVX2 inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  // Biased exponent to double via the 2^52 magic constant; exact for
  // 0 <= biased < 2^52.
  const __m256i biased = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  const __m256d biased_d =
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(magic))), magic);
  __m256d e = _mm256_sub_pd(biased_d, _mm256_set1_pd(1023.0));

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(detail::kMantissaMask))),
                      _mm256_set1_epi64x(static_cast<long long>(detail::kExponentOne))));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(detail::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);

  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(kPoly[kPolyTerms - 1]);
  for (int k = kPolyTerms - 2; k >= 0; --k) {
    poly = _mm256_add_pd(_mm256_mul_pd(poly, z), _mm256_set1_pd(kPoly[k]));
  }
  const __m256d r = _mm256_mul_pd(_mm256_add_pd(s, s), poly);
  const __m256d lo = _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(detail::kLn2Lo)), r);
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(detail::kLn2Hi)), lo);
}

QA_AVX2 inline __m256d xlogx4(__m256d p) {
  const __m256d normal = _mm256_cmp_pd(p, _mm256_set1_pd(detail::kMinNormal), _CMP_GE_OQ);
  const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), p, normal);
  return _mm256_mul_pd(p, log4(safe));
}

// Same select semantics as detail::clamp_scalar: max_pd/min_pd return the
// second operand unless the first strictly wins.
QA_AVX2 inline __m256d clamp4(__m256d x, __m256d lo, __m256d hi) {
  return _mm256_min_pd(_mm256_max_pd(x, lo), hi);
}

}  // namespace

bool available() noexcept { return __builtin_cpu_supports("avx2"); }

QA_AVX2 void entropy_batch(std::span<const double> p, std::span<double> out) noexcept {
  assert(p.size() == out.size());
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d ln2 = _mm256_set1_pd(detail::kLn2);
  std::size_t i = 0;
  for (; i + 4 <= p.size(); i += 4) {
    const __m256d v = _mm256_loadu_pd(p.data() + i);
    const __m256d sum = _mm256_add_pd(xlogx4(v), xlogx4(_mm256_sub_pd(one, v)));
    const __m256d h = _mm256_sub_pd(zero, sum);
    // h < ln2 ? h : ln2
    _mm256_storeu_pd(out.data() + i, _mm256_min_pd(h, ln2));
  }
  for (; i < p.size(); ++i) out[i] = detail::entropy_scalar(p[i]);
}

QA_AVX2 std::size_t kl_batch(std::span<const double> p, std::span<const double> q,
                             std::span<double> out, double eps) noexcept {
  assert(p.size() == q.size() && p.size() == out.size());
  const __m256d lo = _mm256_set1_pd(eps);
  const __m256d hi = _mm256_set1_pd(1.0 - eps);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t clamped = 0;
  std::size_t i = 0;
  for (; i + 4 <= p.size(); i += 4) {
    const __m256d pv = _mm256_loadu_pd(p.data() + i);
    const __m256d qv = _mm256_loadu_pd(q.data() + i);
    const __m256d pc = clamp4(pv, lo, hi);
    const __m256d qc = clamp4(qv, lo, hi);
    const __m256d changed = _mm256_or_pd(_mm256_cmp_pd(pc, pv, _CMP_NEQ_UQ),
                                         _mm256_cmp_pd(qc, qv, _CMP_NEQ_UQ));
    clamped += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(changed)));
    const __m256d a = _mm256_mul_pd(pc, log4(_mm256_div_pd(pc, qc)));
    const __m256d pn = _mm256_sub_pd(one, pc);
    const __m256d qn = _mm256_sub_pd(one, qc);
    const __m256d b = _mm256_mul_pd(pn, log4(_mm256_div_pd(pn, qn)));
    // sum > 0 ? sum : 0
    _mm256_storeu_pd(out.data() + i, _mm256_max_pd(_mm256_add_pd(a, b), zero));
  }
  for (; i < p.size(); ++i) {
    bool c = false;
    out[i] = detail::kl_scalar(p[i], q[i], eps, c);
    clamped += c ? 1 : 0;
  }
  return clamped;
}

QA_AVX2 double gather_sum(std::span<const double> values,
                          std::span<const std::uint32_t> index) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = index.size();
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index.data() + i));
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(values.data(), idx, 8));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += values[index[i]];
  return total;
}

#undef QA_AVX2

#else  // !QUADAUDIT_HAVE_AVX2_KERNELS

bool available() noexcept { return false; }

void entropy_batch(std::span<const double> p, std::span<double> out) noexcept {
  scalar::entropy_batch(p, out);
}

std::size_t kl_batch(std::span<const double> p, std::span<const double> q,
                     std::span<double> out, double eps) noexcept {
  return scalar::kl_batch(p, q, out, eps);
}

double gather_sum(std::span<const double> values,
                  std::span<const std::uint32_t> index) noexcept {
  return scalar::gather_sum(values, index);
}

#endif

}  // namespace quadaudit::kernels::avx2
