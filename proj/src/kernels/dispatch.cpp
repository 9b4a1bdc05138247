#include <atomic>

#include "log_poly.hpp"
#include "quadaudit/error.hpp"
#include "quadaudit/kernels.hpp"

namespace quadaudit::kernels {

namespace {

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw AuditError(ErrorKind::kInput, "kernel span size mismatch");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

Isa detect_isa() noexcept { return avx2::available() ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) noexcept {
  if (isa == Isa::kAvx2 && !avx2::available()) isa = Isa::kScalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

double log_reference(double x) noexcept { return detail::log_scalar(x); }

void entropy_batch(std::span<const double> p, std::span<double> out) {
  require_same_size(p.size(), out.size());
  if (active_isa() == Isa::kAvx2) {
    avx2::entropy_batch(p, out);
  } else {
    scalar::entropy_batch(p, out);
  }
}

KlBatchStats kl_batch(std::span<const double> p, std::span<const double> q,
                      std::span<double> out, double eps) {
  require_same_size(p.size(), q.size());
  require_same_size(p.size(), out.size());
  if (!(eps > 0.0 && eps < 0.5)) throw AuditError(ErrorKind::kInput, "KL epsilon out of range");
  const std::size_t clamped = active_isa() == Isa::kAvx2 ? avx2::kl_batch(p, q, out, eps)
                                                         : scalar::kl_batch(p, q, out, eps);
  return {clamped};
}

double gather_sum(std::span<const double> values, std::span<const std::uint32_t> index) {
  return active_isa() == Isa::kAvx2 ? avx2::gather_sum(values, index)
                                    : scalar::gather_sum(values, index);
}

}  // namespace quadaudit::kernels
