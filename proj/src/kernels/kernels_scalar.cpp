#include <cassert>

#include "log_poly.hpp"
#include "quadaudit/kernels.hpp"

namespace quadaudit::kernels::scalar {

void entropy_batch(std::span<const double> p, std::span<double> out) noexcept {
  assert(p.size() == out.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = detail::entropy_scalar(p[i]);
}

std::size_t kl_batch(std::span<const double> p, std::span<const double> q,
                     std::span<double> out, double eps) noexcept {
  assert(p.size() == q.size() && p.size() == out.size());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    bool c = false;
    out[i] = detail::kl_scalar(p[i], q[i], eps, c);
    clamped += c ? 1 : 0;
  }
  return clamped;
}

double gather_sum(std::span<const double> values, std::span<const std::uint32_t> index) noexcept {
  // Four interleaved partial sums, combined pairwise; the AVX2 variant
  // reduces in exactly this order.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  const std::size_t n = index.size();
  for (; i + 4 <= n; i += 4) {
    acc[0] += values[index[i]];
    acc[1] += values[index[i + 1]];
    acc[2] += values[index[i + 2]];
    acc[3] += values[index[i + 3]];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += values[index[i]];
  return total;
}

}  // namespace quadaudit::kernels::scalar
