#include "quadaudit/taxonomy.hpp"

#include <algorithm>

#include "quadaudit/kernels.hpp"
#include "quadaudit/stats.hpp"

namespace quadaudit {

namespace {

// Everything except entropy and KL, which callers fill per sample or in batch.
SampleAudit audit_flags(const SampleRecord& r, const TaxonomyOptions& options) {
  SampleAudit a;
  a.sample_id = r.sample_id;
  a.consistent = is_consistent(r);
  a.image_reliant = is_image_reliant(r, options.strict_reliance);
  a.quadrant = classify(a.consistent, a.image_reliant);
  a.correct = r.image_original.verdict == r.ground_truth;
  a.ground_truth = r.ground_truth;
  a.finding = r.finding;

  const Verdict original = r.image_original.verdict;
  if (r.swap_passes && !r.swap_passes->empty()) {
    const auto& swaps = *r.swap_passes;
    const auto agree = static_cast<std::size_t>(std::count_if(
        swaps.begin(), swaps.end(), [&](const Pass& p) { return p.verdict == original; }));
    a.swap_invariant = agree == swaps.size();
    a.swap_agreement = static_cast<double>(agree) / static_cast<double>(swaps.size());
  }
  if (r.null_image) a.null_agrees = r.null_image->verdict == original;
  return a;
}

}  // namespace

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::kIdeal: return "Ideal";
    case Quadrant::kFragile: return "Fragile";
    case Quadrant::kDangerous: return "Dangerous";
    case Quadrant::kWorst: return "Worst";
  }
  return "?";
}

std::optional<Quadrant> parse_quadrant(std::string_view name) noexcept {
  for (Quadrant q : kAllQuadrants) {
    if (to_string(q) == name) return q;
  }
  return std::nullopt;
}

std::string_view to_string(KlMode mode) noexcept {
  return mode == KlMode::kForward ? "forward" : "symmetric";
}

std::optional<KlMode> parse_kl_mode(std::string_view name) noexcept {
  if (name == "forward") return KlMode::kForward;
  if (name == "symmetric") return KlMode::kSymmetric;
  return std::nullopt;
}

bool is_consistent(const SampleRecord& r) noexcept {
  const Verdict original = r.image_original.verdict;
  return std::all_of(r.image_paraphrases.begin(), r.image_paraphrases.end(),
                     [&](const Pass& p) { return p.verdict == original; });
}

bool is_image_reliant(const SampleRecord& r, bool strict) noexcept {
  const Verdict text = r.text_only.verdict;
  if (r.image_original.verdict == text) return false;
  if (!strict) return true;
  return std::none_of(r.image_paraphrases.begin(), r.image_paraphrases.end(),
                      [&](const Pass& p) { return p.verdict == text; });
}

Quadrant classify(const SampleRecord& r, const TaxonomyOptions& options) noexcept {
  return classify(is_consistent(r), is_image_reliant(r, options.strict_reliance));
}

SampleAudit audit_sample(const SampleRecord& r, const TaxonomyOptions& options) {
  SampleAudit a = audit_flags(r, options);
  const auto& img = r.image_original.p_yes;
  const auto& txt = r.text_only.p_yes;
  if (img) a.entropy_nats = stats::binary_entropy(*img);
  if (img && txt) {
    const stats::KlValue kl = options.kl_mode == KlMode::kForward
                                  ? stats::binary_kl_detail(*img, *txt)
                                  : stats::symmetric_kl_detail(*img, *txt);
    a.kl_img_text_nats = kl.nats;
    a.kl_clamped = kl.clamped;
  }
  return a;
}

std::vector<SampleAudit> audit_cohort(const Cohort& cohort, const TaxonomyOptions& options) {
  const auto& records = cohort.records();
  std::vector<SampleAudit> audits;
  audits.reserve(records.size());

  // Gather probabilities for the batched kernels; samples without them keep
  // entropy/KL absent.
  std::vector<std::size_t> ent_rows, kl_rows;
  std::vector<double> ent_p, kl_p, kl_q;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& r = records[i];
    audits.push_back(audit_flags(r, options));
    if (r.image_original.p_yes) {
      ent_rows.push_back(i);
      ent_p.push_back(*r.image_original.p_yes);
      if (r.text_only.p_yes) {
        kl_rows.push_back(i);
        kl_p.push_back(*r.image_original.p_yes);
        kl_q.push_back(*r.text_only.p_yes);
      }
    }
  }

  std::vector<double> entropy(ent_p.size());
  kernels::entropy_batch(ent_p, entropy);
  for (std::size_t j = 0; j < ent_rows.size(); ++j) audits[ent_rows[j]].entropy_nats = entropy[j];

  std::vector<double> kl(kl_p.size());
  kernels::kl_batch(kl_p, kl_q, kl);
  if (options.kl_mode == KlMode::kSymmetric) {
    std::vector<double> reverse(kl_p.size());
    kernels::kl_batch(kl_q, kl_p, reverse);
    for (std::size_t j = 0; j < kl.size(); ++j) kl[j] += reverse[j];
  }
  const double hi = 1.0 - kernels::kKlEpsilon;
  for (std::size_t j = 0; j < kl_rows.size(); ++j) {
    SampleAudit& a = audits[kl_rows[j]];
    a.kl_img_text_nats = kl[j];
    a.kl_clamped = kl_p[j] < kernels::kKlEpsilon || kl_p[j] > hi ||
                   kl_q[j] < kernels::kKlEpsilon || kl_q[j] > hi;
  }
  return audits;
}

}  // namespace quadaudit
