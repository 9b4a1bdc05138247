#pragma once

// Data-parallel inner loops of the audit: batched binary entropy, batched
// binary KL and the gather-sum behind every bootstrap resample.
//
// Each kernel has a scalar reference and an AVX2 variant. Both follow the
// same operation sequence (same log polynomial, same 4-lane reduction order,
// no contraction into FMA), so their outputs are bit-identical and results
// never depend on the host CPU.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace quadaudit::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best instruction set the host supports and this build was compiled for.
Isa detect_isa() noexcept;

/// Instruction set used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Overrides dispatch (tests, benchmarks). Requesting an unsupported ISA
/// falls back to scalar. Returns the ISA actually installed.
Isa set_active_isa(Isa isa) noexcept;

/// Saturation bound for probabilities entering KL.
constexpr double kKlEpsilon = 1e-9;

struct KlBatchStats {
  std::size_t clamped = 0;  // elements where p or q hit the [eps, 1-eps] clamp
};

// Natural log for finite positive normal doubles; the shared algorithm.
double log_reference(double x) noexcept;

// Dispatching entry points. Output spans must match input sizes.
void entropy_batch(std::span<const double> p, std::span<double> out);
KlBatchStats kl_batch(std::span<const double> p, std::span<const double> q,
                      std::span<double> out, double eps = kKlEpsilon);
double gather_sum(std::span<const double> values, std::span<const std::uint32_t> index);

namespace scalar {
void entropy_batch(std::span<const double> p, std::span<double> out) noexcept;
std::size_t kl_batch(std::span<const double> p, std::span<const double> q,
                     std::span<double> out, double eps) noexcept;
double gather_sum(std::span<const double> values,
                  std::span<const std::uint32_t> index) noexcept;
}  // namespace scalar

namespace avx2 {
/// False when the build or the host lacks AVX2; the functions below must not
/// be called in that case.
bool available() noexcept;
void entropy_batch(std::span<const double> p, std::span<double> out) noexcept;
std::size_t kl_batch(std::span<const double> p, std::span<const double> q,
                     std::span<double> out, double eps) noexcept;
double gather_sum(std::span<const double> values,
                  std::span<const std::uint32_t> index) noexcept;
}  // namespace avx2

}  // namespace quadaudit::kernels
