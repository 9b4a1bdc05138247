#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadaudit/records.hpp"

namespace quadaudit {

enum class Quadrant : unsigned char { kIdeal = 0, kFragile = 1, kDangerous = 2, kWorst = 3 };

inline constexpr std::array<Quadrant, 4> kAllQuadrants = {
    Quadrant::kIdeal, Quadrant::kFragile, Quadrant::kDangerous, Quadrant::kWorst};

constexpr std::size_t index_of(Quadrant q) noexcept { return static_cast<std::size_t>(q); }

std::string_view to_string(Quadrant q) noexcept;
std::optional<Quadrant> parse_quadrant(std::string_view name) noexcept;

/// Per-quadrant table, indexed by Quadrant.
template <class T>
using QuadrantMap = std::array<T, 4>;

enum class KlMode { kForward, kSymmetric };

std::string_view to_string(KlMode mode) noexcept;
std::optional<KlMode> parse_kl_mode(std::string_view name) noexcept;

struct TaxonomyOptions {
  /// Also require every paraphrase verdict to differ from the text-only
  /// verdict before calling a sample image-reliant.
  bool strict_reliance = false;
  KlMode kl_mode = KlMode::kForward;
};

/// Original image-conditioned verdict equals every paraphrase verdict.
bool is_consistent(const SampleRecord& record) noexcept;

/// Original image-conditioned verdict differs from the text-only verdict.
bool is_image_reliant(const SampleRecord& record, bool strict = false) noexcept;

constexpr Quadrant classify(bool consistent, bool image_reliant) noexcept {
  if (consistent) return image_reliant ? Quadrant::kIdeal : Quadrant::kDangerous;
  return image_reliant ? Quadrant::kFragile : Quadrant::kWorst;
}

Quadrant classify(const SampleRecord& record, const TaxonomyOptions& options = {}) noexcept;

struct SampleAudit {
  std::string sample_id;
  Quadrant quadrant = Quadrant::kWorst;
  bool consistent = false;
  bool image_reliant = false;
  bool correct = false;
  Verdict ground_truth = Verdict::kNo;
  std::optional<std::string> finding;

  // Absent when the log carried verdicts without probabilities.
  std::optional<double> entropy_nats;
  std::optional<double> kl_img_text_nats;
  bool kl_clamped = false;

  std::optional<bool> swap_invariant;   // every swap verdict equals the original
  std::optional<double> swap_agreement; // fraction of swaps agreeing
  std::optional<bool> null_agrees;
};

SampleAudit audit_sample(const SampleRecord& record, const TaxonomyOptions& options = {});

/// Audits every record of a cohort; entropy and KL run through the batched
/// kernels. Output order follows the cohort.
std::vector<SampleAudit> audit_cohort(const Cohort& cohort, const TaxonomyOptions& options = {});

}  // namespace quadaudit
