#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadaudit/stats.hpp"
#include "quadaudit/taxonomy.hpp"

namespace quadaudit::metrics {

struct QuadrantDistribution {
  QuadrantMap<std::size_t> counts{};
  QuadrantMap<double> fractions{};
  std::size_t n = 0;

  double fraction(Quadrant q) const noexcept { return fractions[index_of(q)]; }
  std::size_t count(Quadrant q) const noexcept { return counts[index_of(q)]; }
};

/// A cohort rate with its bootstrap interval.
struct Rate {
  double value = 0.0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  stats::ConfidenceInterval ci;
};

struct QuadrantAccuracy {
  QuadrantMap<std::size_t> correct{};
  QuadrantMap<std::size_t> total{};
  QuadrantMap<std::optional<double>> accuracy{};  // absent for empty quadrants
  double overall = 0.0;
};

/// Dangerous fraction among samples of each ground-truth label, indexed by
/// Verdict (kNo = 0, kYes = 1).
struct GtConditioned {
  std::array<std::size_t, 2> total{};
  std::array<std::size_t, 2> dangerous{};
  std::array<std::optional<double>, 2> fraction{};

  std::optional<double> of(Verdict v) const noexcept {
    return fraction[static_cast<std::size_t>(v)];
  }
};

struct FindingRow {
  std::string finding;
  std::size_t n = 0;
  std::size_t dangerous = 0;
  double dangerous_fraction = 0.0;

  friend bool operator==(const FindingRow&, const FindingRow&) = default;
};

using EntropySummary = QuadrantMap<std::optional<stats::Describe>>;

inline constexpr std::size_t kDefaultMinFindingN = 15;

QuadrantDistribution quadrant_distribution(std::span<const SampleAudit> audits);
Rate flip_rate(std::span<const SampleAudit> audits, const stats::BootstrapOptions& boot = {});
Rate dangerous_fraction(std::span<const SampleAudit> audits,
                        const stats::BootstrapOptions& boot = {});
QuadrantAccuracy quadrant_accuracy(std::span<const SampleAudit> audits);
GtConditioned gt_conditioned_dangerous(std::span<const SampleAudit> audits);

/// Findings with at least `min_n` samples, by Dangerous fraction descending,
/// ties by name. Samples without a finding label are skipped.
std::vector<FindingRow> per_finding_breakdown(std::span<const SampleAudit> audits,
                                              std::size_t min_n = kDefaultMinFindingN);

/// Entropy statistics per quadrant over samples that carry an entropy value.
EntropySummary entropy_summary(std::span<const SampleAudit> audits);

/// Everything the audit reports for one (model, dataset) cohort.
struct CohortSummary {
  std::string model_id;
  std::string dataset_id;
  std::size_t n = 0;
  std::size_t k = 0;
  QuadrantDistribution distribution;
  Rate flip_rate;
  Rate dangerous_fraction;
  QuadrantAccuracy accuracy;
  GtConditioned gt_conditioned;
  EntropySummary entropy;

  std::string label() const { return model_id + " / " + dataset_id; }
};

CohortSummary summarize_metrics(const std::string& model_id, const std::string& dataset_id,
                                std::size_t k, std::span<const SampleAudit> audits,
                                const stats::BootstrapOptions& boot = {});

}  // namespace quadaudit::metrics
