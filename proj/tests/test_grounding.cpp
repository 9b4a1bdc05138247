#include <gtest/gtest.h>

#include <vector>

#include "quadaudit/error.hpp"
#include "quadaudit/grounding.hpp"
#include "quadaudit/seeding.hpp"
#include "quadaudit/stats.hpp"
#include "quadaudit/synthcohort.hpp"

namespace quadaudit::grounding {
namespace {

constexpr std::size_t kDangerous = index_of(Quadrant::kDangerous);
constexpr std::size_t kIdeal = index_of(Quadrant::kIdeal);

SampleAudit kl_audit(Quadrant q, double kl) {
  SampleAudit a;
  a.quadrant = q;
  a.kl_img_text_nats = kl;
  return a;
}

std::vector<SampleAudit> audit_mixture(const std::vector<synth::ArchetypeSpec>& parts) {
  return audit_cohort(validate_cohort(synth::generate_mixture(parts)));
}

TEST(KlDetection, SeparatedClassesAboveThreshold) {
  CounterRng rng(1);
  std::vector<SampleAudit> a;
  for (int i = 0; i < 200; ++i) a.push_back(kl_audit(Quadrant::kDangerous, 0.1 + 0.1 * (rng.uniform() - 0.5)));
  for (int i = 0; i < 200; ++i) a.push_back(kl_audit(Quadrant::kIdeal, 1.1 + 0.6 * (rng.uniform() - 0.5)));
  const DetectionReport r = kl_detection(a);
  EXPECT_GE(r.auroc(), 0.95);
  EXPECT_GE(*r.auroc_dangerous_vs_ideal, 0.95);
  EXPECT_NEAR(r.mean_kl_by_quadrant[kDangerous]->mean, 0.1, 0.01);
  EXPECT_NEAR(r.mean_kl_by_quadrant[kIdeal]->mean, 1.1, 0.05);
  EXPECT_EQ(r.scored, 400u);
  EXPECT_FALSE(r.mean_kl_by_quadrant[index_of(Quadrant::kWorst)]);
}

TEST(KlDetection, EqualScoresGiveHalf) {
  std::vector<SampleAudit> a;
  for (Quadrant q : kAllQuadrants) {
    for (int i = 0; i < 3; ++i) a.push_back(kl_audit(q, 0.4));
  }
  EXPECT_EQ(kl_detection(a).auroc(), 0.5);
}

TEST(KlDetection, FourSamplesMatchPairCount) {
  // Dangerous KL {0.2, 0.5}; rest {0.3, 0.9}. Scores are -KL, so the
  // Dangerous sample wins when its KL is lower: (0.2<0.3),(0.2<0.9),(0.5<0.9)
  // are wins and (0.5 vs 0.3) a loss: 3 of 4 pairs.
  const std::vector<SampleAudit> a = {kl_audit(Quadrant::kDangerous, 0.2), kl_audit(Quadrant::kIdeal, 0.3),
                                      kl_audit(Quadrant::kDangerous, 0.5), kl_audit(Quadrant::kWorst, 0.9)};
  const DetectionReport r = kl_detection(a);
  EXPECT_EQ(*r.auroc_dangerous_vs_rest, 0.75);
  EXPECT_EQ(*r.auroc_dangerous_vs_ideal, 0.5);
  EXPECT_EQ(kl_detection(a, Population::kDangerousVsIdeal).auroc(), 0.5);
}

TEST(KlDetection, SingleClassIsUndefined) {
  std::vector<SampleAudit> a = {kl_audit(Quadrant::kDangerous, 0.1), kl_audit(Quadrant::kWorst, 0.4)};
  EXPECT_THROW(kl_detection(a, Population::kDangerousVsIdeal), AuditError);
  const DetectionReport r = kl_detection(a);
  EXPECT_FALSE(r.auroc_dangerous_vs_ideal);
  a.pop_back();
  EXPECT_THROW(kl_detection(a), AuditError);
}

TEST(KlDetection, NegatedScoresComplement) {
  CounterRng rng(2);
  std::vector<SampleAudit> a;
  std::vector<double> kl;
  std::vector<bool> positive;
  for (int i = 0; i < 300; ++i) {
    const Quadrant q = kAllQuadrants[rng.below(4)];
    const double v = rng.uniform();
    a.push_back(kl_audit(q, v));
    kl.push_back(v);
    positive.push_back(q == Quadrant::kDangerous);
  }
  EXPECT_NEAR(kl_detection(a).auroc() + stats::auroc(kl, positive), 1.0, 1e-12);
}

TEST(KlDetection, PipelineKlEqualsDirectKl) {
  synth::ArchetypeSpec shortcut;
  shortcut.n = 50;
  shortcut.confidence = 0.8;
  synth::ArchetypeSpec oracle;
  oracle.kind = synth::Archetype::kOracleGrounded;
  oracle.n = 50;
  const auto records = synth::generate_mixture({shortcut, oracle});
  const auto audits = audit_cohort(validate_cohort(records));
  for (std::size_t i = 0; i < audits.size(); ++i) {
    if (audits[i].quadrant != Quadrant::kDangerous) continue;
    EXPECT_EQ(*audits[i].kl_img_text_nats,
              stats::binary_kl(*records[i].image_original.p_yes, *records[i].text_only.p_yes));
  }
  EXPECT_EQ(kl_detection(audits).auroc(), 1.0);
}

TEST(SwapInvariance, TextShortcutIsFullyInvariant) {
  synth::ArchetypeSpec s;
  s.n = 80;
  s.include_swaps = 5;
  s.include_null = true;
  const auto audits = audit_mixture({s});
  const SwapReport r = swap_invariance(audits);
  EXPECT_EQ(r.invariant_rate[kDangerous], 1.0);
  EXPECT_EQ(r.per_swap_agreement[kDangerous], 1.0);
  EXPECT_FALSE(r.invariant_rate[kIdeal]);
  EXPECT_EQ(r.swap_coverage, 1.0);
  EXPECT_EQ(null_image_agreement(audits).null_agreement_rate[kDangerous], 1.0);
}

TEST(SwapInvariance, OneFlipPerIdealSample) {
  std::vector<SampleRecord> records;
  for (int i = 0; i < 10; ++i) {
    SampleRecord r;
    r.sample_id = "s" + std::to_string(i);
    r.model_id = "m";
    r.dataset_id = "d";
    r.question = "q";
    r.ground_truth = Verdict::kYes;
    r.image_original = Pass::from_probability(0.9);
    r.image_paraphrases.assign(5, Pass::from_probability(0.9));
    r.text_only = Pass::from_probability(0.1);
    r.swap_passes = std::vector<Pass>(5, Pass::from_probability(0.9));
    (*r.swap_passes)[static_cast<std::size_t>(i) % 5] = Pass::from_probability(0.2);
    records.push_back(std::move(r));
  }
  const auto audits = audit_cohort(validate_cohort(std::move(records)));
  const SwapReport r = swap_invariance(audits);
  EXPECT_EQ(r.invariant_rate[kIdeal], 0.0);
  EXPECT_NEAR(*r.per_swap_agreement[kIdeal], 0.8, 1e-15);
}

TEST(SwapInvariance, InvariantRateNeverExceedsAgreement) {
  synth::ArchetypeSpec fragile;
  fragile.kind = synth::Archetype::kFragileGrounded;
  fragile.paraphrase_flip_prob = 0.1;
  fragile.n = 300;
  fragile.include_swaps = 5;
  synth::ArchetypeSpec random;
  random.kind = synth::Archetype::kRandom;
  random.n = 300;
  random.include_swaps = 5;
  const SwapReport r = swap_invariance(audit_mixture({fragile, random}));
  for (std::size_t q = 0; q < 4; ++q) {
    if (!r.invariant_rate[q]) continue;
    EXPECT_LE(*r.invariant_rate[q], *r.per_swap_agreement[q] + 1e-15);
  }
}

TEST(SwapInvariance, MissingDataIsExplicit) {
  synth::ArchetypeSpec s;
  s.n = 10;
  const auto audits = audit_mixture({s});
  EXPECT_THROW(swap_invariance(audits), AuditError);
  EXPECT_THROW(null_image_agreement(audits), AuditError);
  const SwapReport r = grounding_checks(audits);
  EXPECT_FALSE(r.has_swaps);
  EXPECT_FALSE(r.has_null);
  EXPECT_EQ(r.swap_coverage, 0.0);
}

TEST(NullImage, OracleGroundedAgreesOnHalf) {
  synth::ArchetypeSpec s;
  s.kind = synth::Archetype::kOracleGrounded;
  s.n = 200;
  s.gt_yes_rate = 0.5;
  s.include_null = true;
  const SwapReport r = null_image_agreement(audit_mixture({s}));
  EXPECT_NEAR(*r.null_agreement_rate[kIdeal], 0.5, 0.02);
  EXPECT_EQ(r.null_coverage, 1.0);
}

TEST(NullImage, MixedCoverageReported) {
  synth::ArchetypeSpec with;
  with.n = 30;
  with.include_null = true;
  with.include_swaps = 2;
  synth::ArchetypeSpec without;
  without.n = 70;
  without.seed = 9;
  const SwapReport r = grounding_checks(audit_mixture({with, without}));
  EXPECT_TRUE(r.has_null);
  EXPECT_TRUE(r.has_swaps);
  EXPECT_NEAR(r.null_coverage, 0.3, 1e-15);
  EXPECT_NEAR(r.swap_coverage, 0.3, 1e-15);
  EXPECT_EQ(r.null_agreement_rate[kDangerous], 1.0);
}

TEST(Population, Names) {
  EXPECT_EQ(to_string(Population::kDangerousVsIdeal), "dangerous-vs-ideal");
  EXPECT_EQ(parse_population("dangerous-vs-rest"), Population::kDangerousVsRest);
  EXPECT_FALSE(parse_population("all"));
}

}  // namespace
}  // namespace quadaudit::grounding
