#include "quadaudit/grounding.hpp"

#include <vector>

#include "quadaudit/error.hpp"
#include "quadaudit/stats.hpp"

namespace quadaudit::grounding {

namespace {

std::optional<double> auroc_for(std::span<const SampleAudit> audits, Population population) {
  std::vector<double> scores;
  std::vector<bool> positives;
  std::size_t pos = 0;
  for (const SampleAudit& a : audits) {
    if (!a.kl_img_text_nats) continue;
    const bool dangerous = a.quadrant == Quadrant::kDangerous;
    if (population == Population::kDangerousVsIdeal && !dangerous &&
        a.quadrant != Quadrant::kIdeal) {
      continue;
    }
    // Low KL signals a text shortcut.
    scores.push_back(-*a.kl_img_text_nats);
    positives.push_back(dangerous);
    pos += dangerous ? 1 : 0;
  }
  if (pos == 0 || pos == positives.size()) return std::nullopt;
  return stats::auroc(scores, positives);
}

bool fill_swaps(std::span<const SampleAudit> audits, SwapReport& report) {
  QuadrantMap<std::size_t> total{}, invariant{};
  QuadrantMap<double> agreement_sum{};
  std::size_t covered = 0;
  for (const SampleAudit& a : audits) {
    if (!a.swap_invariant) continue;
    ++covered;
    const std::size_t q = index_of(a.quadrant);
    ++total[q];
    invariant[q] += *a.swap_invariant ? 1 : 0;
    agreement_sum[q] += *a.swap_agreement;
  }
  if (covered == 0) return false;
  report.has_swaps = true;
  report.swap_coverage = static_cast<double>(covered) / static_cast<double>(audits.size());
  for (Quadrant quad : kAllQuadrants) {
    const std::size_t q = index_of(quad);
    if (total[q] == 0) continue;
    const auto t = static_cast<double>(total[q]);
    report.invariant_rate[q] = static_cast<double>(invariant[q]) / t;
    report.per_swap_agreement[q] = agreement_sum[q] / t;
  }
  return true;
}

bool fill_null(std::span<const SampleAudit> audits, SwapReport& report) {
  QuadrantMap<std::size_t> total{}, agree{};
  std::size_t covered = 0;
  for (const SampleAudit& a : audits) {
    if (!a.null_agrees) continue;
    ++covered;
    const std::size_t q = index_of(a.quadrant);
    ++total[q];
    agree[q] += *a.null_agrees ? 1 : 0;
  }
  if (covered == 0) return false;
  report.has_null = true;
  report.null_coverage = static_cast<double>(covered) / static_cast<double>(audits.size());
  for (Quadrant quad : kAllQuadrants) {
    const std::size_t q = index_of(quad);
    if (total[q] == 0) continue;
    report.null_agreement_rate[q] =
        static_cast<double>(agree[q]) / static_cast<double>(total[q]);
  }
  return true;
}

}  // namespace

std::string_view to_string(Population p) noexcept {
  return p == Population::kDangerousVsRest ? "dangerous-vs-rest" : "dangerous-vs-ideal";
}

std::optional<Population> parse_population(std::string_view name) noexcept {
  if (name == "dangerous-vs-rest") return Population::kDangerousVsRest;
  if (name == "dangerous-vs-ideal") return Population::kDangerousVsIdeal;
  return std::nullopt;
}

double DetectionReport::auroc() const {
  const auto& v = population == Population::kDangerousVsRest ? auroc_dangerous_vs_rest
                                                              : auroc_dangerous_vs_ideal;
  if (!v) throw AuditError(ErrorKind::kUndefined, "AUROC undefined for single-class population");
  return *v;
}

DetectionReport kl_detection(std::span<const SampleAudit> audits, Population population) {
  DetectionReport report;
  report.population = population;

  QuadrantMap<std::vector<double>> by_quadrant;
  for (const SampleAudit& a : audits) {
    if (!a.kl_img_text_nats) continue;
    ++report.scored;
    report.clamped_count += a.kl_clamped ? 1 : 0;
    by_quadrant[index_of(a.quadrant)].push_back(*a.kl_img_text_nats);
  }
  for (Quadrant q : kAllQuadrants) {
    const auto& kl = by_quadrant[index_of(q)];
    if (kl.empty()) continue;
    const stats::Describe d = stats::describe(kl);
    report.mean_kl_by_quadrant[index_of(q)] = MeanSd{d.count, d.mean, d.sd};
  }

  report.auroc_dangerous_vs_rest = auroc_for(audits, Population::kDangerousVsRest);
  report.auroc_dangerous_vs_ideal = auroc_for(audits, Population::kDangerousVsIdeal);
  const auto& requested = population == Population::kDangerousVsRest
                              ? report.auroc_dangerous_vs_rest
                              : report.auroc_dangerous_vs_ideal;
  if (!requested) {
    throw AuditError(ErrorKind::kUndefined,
                     "single-class population for " + std::string(to_string(population)));
  }
  return report;
}

SwapReport swap_invariance(std::span<const SampleAudit> audits) {
  SwapReport report;
  if (!fill_swaps(audits, report)) throw AuditError(ErrorKind::kValidation, "no swap passes");
  return report;
}

SwapReport null_image_agreement(std::span<const SampleAudit> audits) {
  SwapReport report;
  if (!fill_null(audits, report)) {
    throw AuditError(ErrorKind::kValidation, "no null-image passes");
  }
  return report;
}

SwapReport grounding_checks(std::span<const SampleAudit> audits) {
  SwapReport report;
  if (audits.empty()) return report;
  fill_swaps(audits, report);
  fill_null(audits, report);
  return report;
}

}  // namespace quadaudit::grounding
