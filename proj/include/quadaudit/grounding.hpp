#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "quadaudit/taxonomy.hpp"

namespace quadaudit::grounding {

enum class Population { kDangerousVsRest, kDangerousVsIdeal };

std::string_view to_string(Population p) noexcept;
std::optional<Population> parse_population(std::string_view name) noexcept;

struct MeanSd {
  std::size_t count = 0;
  double mean = 0.0;
  std::optional<double> sd;  // absent for a single sample
};

struct DetectionReport {
  Population population = Population::kDangerousVsRest;
  QuadrantMap<std::optional<MeanSd>> mean_kl_by_quadrant{};
  /// Scores are -KL, positives are Dangerous samples. Absent when the
  /// population lacks one of its two classes.
  std::optional<double> auroc_dangerous_vs_rest;
  std::optional<double> auroc_dangerous_vs_ideal;
  std::size_t scored = 0;         // samples carrying a KL value
  std::size_t clamped_count = 0;

  /// AUROC for the requested population.
  double auroc() const;
};

/// Throws AuditError(kUndefined) when the requested population has a single
/// class; the other population is reported when computable.
DetectionReport kl_detection(std::span<const SampleAudit> audits,
                             Population population = Population::kDangerousVsRest);

struct SwapReport {
  QuadrantMap<std::optional<double>> invariant_rate{};
  QuadrantMap<std::optional<double>> per_swap_agreement{};
  QuadrantMap<std::optional<double>> null_agreement_rate{};
  double swap_coverage = 0.0;  // fraction of audits with swap passes
  double null_coverage = 0.0;  // fraction of audits with a null-image pass
  bool has_swaps = false;
  bool has_null = false;
};

/// Throws AuditError(kValidation) "no swap passes" when nothing carries swaps.
SwapReport swap_invariance(std::span<const SampleAudit> audits);

/// Throws AuditError(kValidation) "no null-image passes" likewise.
SwapReport null_image_agreement(std::span<const SampleAudit> audits);

/// Both checks, leaving absent whatever the logs do not cover. Never throws
/// for missing data.
SwapReport grounding_checks(std::span<const SampleAudit> audits);

}  // namespace quadaudit::grounding
