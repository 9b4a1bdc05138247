#include "quadaudit/metrics.hpp"

#include <algorithm>
#include <map>

#include "quadaudit/error.hpp"
#include "quadaudit/seeding.hpp"

namespace quadaudit::metrics {

namespace {

void require_nonempty(std::span<const SampleAudit> audits) {
  if (audits.empty()) throw AuditError(ErrorKind::kValidation, "empty cohort");
}

template <class Pred>
Rate indicator_rate(std::span<const SampleAudit> audits, const stats::BootstrapOptions& boot,
                    std::string_view label, Pred pred) {
  require_nonempty(audits);
  std::vector<double> indicator;
  indicator.reserve(audits.size());
  std::size_t hits = 0;
  for (const SampleAudit& a : audits) {
    const bool hit = pred(a);
    hits += hit ? 1 : 0;
    indicator.push_back(hit ? 1.0 : 0.0);
  }
  stats::BootstrapOptions derived = boot;
  derived.seed = derive_seed(boot.seed, label);
  Rate r;
  r.numerator = hits;
  r.denominator = audits.size();
  r.value = static_cast<double>(hits) / static_cast<double>(audits.size());
  r.ci = stats::bootstrap_ci(indicator, derived);
  return r;
}

}  // namespace

QuadrantDistribution quadrant_distribution(std::span<const SampleAudit> audits) {
  require_nonempty(audits);
  QuadrantDistribution d;
  d.n = audits.size();
  for (const SampleAudit& a : audits) ++d.counts[index_of(a.quadrant)];
  for (Quadrant q : kAllQuadrants) {
    d.fractions[index_of(q)] =
        static_cast<double>(d.counts[index_of(q)]) / static_cast<double>(d.n);
  }
  return d;
}

Rate flip_rate(std::span<const SampleAudit> audits, const stats::BootstrapOptions& boot) {
  return indicator_rate(audits, boot, "flip_rate",
                        [](const SampleAudit& a) { return !a.consistent; });
}

Rate dangerous_fraction(std::span<const SampleAudit> audits, const stats::BootstrapOptions& boot) {
  return indicator_rate(audits, boot, "dangerous_fraction",
                        [](const SampleAudit& a) { return a.quadrant == Quadrant::kDangerous; });
}

QuadrantAccuracy quadrant_accuracy(std::span<const SampleAudit> audits) {
  require_nonempty(audits);
  QuadrantAccuracy acc;
  std::size_t correct = 0;
  for (const SampleAudit& a : audits) {
    ++acc.total[index_of(a.quadrant)];
    if (a.correct) {
      ++acc.correct[index_of(a.quadrant)];
      ++correct;
    }
  }
  for (Quadrant q : kAllQuadrants) {
    const std::size_t i = index_of(q);
    if (acc.total[i] > 0) {
      acc.accuracy[i] = static_cast<double>(acc.correct[i]) / static_cast<double>(acc.total[i]);
    }
  }
  acc.overall = static_cast<double>(correct) / static_cast<double>(audits.size());
  return acc;
}

GtConditioned gt_conditioned_dangerous(std::span<const SampleAudit> audits) {
  require_nonempty(audits);
  GtConditioned g;
  for (const SampleAudit& a : audits) {
    const auto i = static_cast<std::size_t>(a.ground_truth);
    ++g.total[i];
    if (a.quadrant == Quadrant::kDangerous) ++g.dangerous[i];
  }
  for (std::size_t i = 0; i < 2; ++i) {
    if (g.total[i] > 0) {
      g.fraction[i] = static_cast<double>(g.dangerous[i]) / static_cast<double>(g.total[i]);
    }
  }
  return g;
}

std::vector<FindingRow> per_finding_breakdown(std::span<const SampleAudit> audits,
                                              std::size_t min_n) {
  if (min_n == 0) throw AuditError(ErrorKind::kInput, "min_n must be at least 1");
  std::map<std::string, FindingRow> groups;
  for (const SampleAudit& a : audits) {
    if (!a.finding) continue;
    FindingRow& row = groups[*a.finding];
    row.finding = *a.finding;
    ++row.n;
    if (a.quadrant == Quadrant::kDangerous) ++row.dangerous;
  }
  std::vector<FindingRow> rows;
  for (auto& [name, row] : groups) {
    if (row.n < min_n) continue;
    row.dangerous_fraction = static_cast<double>(row.dangerous) / static_cast<double>(row.n);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const FindingRow& a, const FindingRow& b) {
    if (a.dangerous_fraction != b.dangerous_fraction) {
      return a.dangerous_fraction > b.dangerous_fraction;
    }
    return a.finding < b.finding;
  });
  return rows;
}

EntropySummary entropy_summary(std::span<const SampleAudit> audits) {
  require_nonempty(audits);
  QuadrantMap<std::vector<double>> by_quadrant;
  for (const SampleAudit& a : audits) {
    if (a.entropy_nats) by_quadrant[index_of(a.quadrant)].push_back(*a.entropy_nats);
  }
  EntropySummary summary;
  for (Quadrant q : kAllQuadrants) {
    const auto& values = by_quadrant[index_of(q)];
    if (!values.empty()) summary[index_of(q)] = stats::describe(values);
  }
  return summary;
}

CohortSummary summarize_metrics(const std::string& model_id, const std::string& dataset_id,
                                std::size_t k, std::span<const SampleAudit> audits,
                                const stats::BootstrapOptions& boot) {
  CohortSummary s;
  s.model_id = model_id;
  s.dataset_id = dataset_id;
  s.n = audits.size();
  s.k = k;
  s.distribution = quadrant_distribution(audits);
  s.flip_rate = flip_rate(audits, boot);
  s.dangerous_fraction = dangerous_fraction(audits, boot);
  s.accuracy = quadrant_accuracy(audits);
  s.gt_conditioned = gt_conditioned_dangerous(audits);
  s.entropy = entropy_summary(audits);
  return s;
}

}  // namespace quadaudit::metrics
