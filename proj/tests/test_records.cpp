#include <gtest/gtest.h>

#include <sstream>

#include "reference_cohorts.hpp"
#include "quadaudit/error.hpp"
#include "quadaudit/records.hpp"
#include "quadaudit/seeding.hpp"
#include "quadaudit/synthcohort.hpp"

namespace quadaudit {
namespace {

const char* kLine1 =
    R"({"schema_version":1,"sample_id":"a1","model_id":"m","dataset_id":"d","question":"Is there NSG tube?","finding":"NSG tube","ground_truth":"yes","image_original":{"verdict":"yes","p_yes":0.82},"image_paraphrases":[{"verdict":"yes","p_yes":0.8},{"verdict":"yes","p_yes":0.77}],"text_only":{"verdict":"no","p_yes":0.41}})";
const char* kLine2 =
    R"({"schema_version":1,"sample_id":"a2","model_id":"m","dataset_id":"d","question":"Is there any acute abnormality?","ground_truth":"no","image_original":{"p_yes":0.07},"image_paraphrases":[{"p_yes":0.1},{"p_yes":0.2}],"text_only":{"p_yes":0.18},"null_image":{"verdict":"no"}})";
const char* kLine3 =
    R"({"schema_version":1,"sample_id":"a3","model_id":"m","dataset_id":"d","question":"Is there NSG tube?","ground_truth":"yes","image_original":{"verdict":"no"},"image_paraphrases":[{"verdict":"yes"},{"verdict":"no"}],"text_only":{"verdict":"no"},"swap_passes":[{"verdict":"no","p_yes":0.3},{"verdict":"yes","p_yes":0.6}]})";

TEST(DeriveVerdict, ThresholdRule) {
  EXPECT_EQ(derive_verdict(0.82, 0.5), Verdict::kYes);
  EXPECT_EQ(derive_verdict(0.07, 0.5), Verdict::kNo);
  EXPECT_EQ(derive_verdict(0.5, 0.5), Verdict::kYes);
  EXPECT_EQ(derive_verdict(0.5), Verdict::kYes);
  EXPECT_EQ(derive_verdict(0.69, 0.7), Verdict::kNo);
}

TEST(DeriveVerdict, RejectsOutOfRange) {
  EXPECT_THROW(derive_verdict(1.01, 0.5), AuditError);
  EXPECT_THROW(derive_verdict(-0.1, 0.5), AuditError);
  EXPECT_THROW(derive_verdict(0.3, 2.0), AuditError);
}

TEST(ParseRecords, EmptyStream) {
  std::istringstream in("");
  const ParseResult r = parse_records(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.diagnostics.total_lines, 0u);
  EXPECT_EQ(r.diagnostics.evaluable, 0u);
  EXPECT_TRUE(r.diagnostics.excluded.empty());
}

TEST(ParseRecords, ThreeLineFixtureFieldForField) {
  std::istringstream in(std::string(kLine1) + "\n" + kLine2 + "\n" + kLine3 + "\n");
  const ParseResult r = parse_records(in);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.diagnostics.evaluable, 3u);
  EXPECT_EQ(r.diagnostics.total_lines, 3u);

  const SampleRecord& a = r.records[0];
  EXPECT_EQ(a.sample_id, "a1");
  EXPECT_EQ(a.model_id, "m");
  EXPECT_EQ(a.dataset_id, "d");
  EXPECT_EQ(a.question, "Is there NSG tube?");
  EXPECT_EQ(a.finding, std::optional<std::string>("NSG tube"));
  EXPECT_EQ(a.ground_truth, Verdict::kYes);
  EXPECT_EQ(a.image_original, (Pass{Verdict::kYes, 0.82}));
  ASSERT_EQ(a.image_paraphrases.size(), 2u);
  EXPECT_EQ(a.image_paraphrases[1], (Pass{Verdict::kYes, 0.77}));
  EXPECT_EQ(a.text_only, (Pass{Verdict::kNo, 0.41}));
  EXPECT_FALSE(a.swap_passes);
  EXPECT_FALSE(a.null_image);

  // Probability-only passes get derived verdicts.
  const SampleRecord& b = r.records[1];
  EXPECT_FALSE(b.finding);
  EXPECT_EQ(b.image_original, (Pass{Verdict::kNo, 0.07}));
  EXPECT_EQ(b.text_only, (Pass{Verdict::kNo, 0.18}));
  ASSERT_TRUE(b.null_image);
  EXPECT_EQ(b.null_image->verdict, Verdict::kNo);
  EXPECT_FALSE(b.null_image->p_yes);

  const SampleRecord& c = r.records[2];
  EXPECT_FALSE(c.image_original.p_yes);
  ASSERT_TRUE(c.swap_passes);
  ASSERT_EQ(c.swap_passes->size(), 2u);
  EXPECT_EQ((*c.swap_passes)[1], (Pass{Verdict::kYes, 0.6}));
}

TEST(ParseRecords, MissingTextOnlyExcludesLine) {
  std::string bad = kLine1;
  const auto pos = bad.find(R"(,"text_only")");
  bad = bad.substr(0, pos) + "}";
  std::istringstream in(std::string(kLine1) + "\n" + bad + "\n" + kLine2 + "\n");
  const ParseResult r = parse_records(in);
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.diagnostics.total_lines, 3u);
  EXPECT_EQ(r.diagnostics.evaluable, 2u);
  ASSERT_EQ(r.diagnostics.excluded.size(), 1u);
  EXPECT_EQ(r.diagnostics.excluded[0].line, 2u);
  EXPECT_EQ(r.diagnostics.excluded[0].reason, "missing text_only");
}

TEST(ParseRecords, PerLineViolationsAreDiagnostics) {
  std::string mismatch = kLine1;
  mismatch.replace(mismatch.find(R"("verdict":"yes","p_yes":0.82)"), 28,
                   R"("verdict":"no","p_yes":0.82)");
  std::string version = kLine1;
  version.replace(version.find(R"("schema_version":1)"), 18, R"("schema_version":2)");
  std::string range = kLine2;
  range.replace(range.find("0.07"), 4, "1.07");
  std::string empty_para = kLine3;
  empty_para.replace(empty_para.find(R"([{"verdict":"yes"},{"verdict":"no"}])"), 36, "[]");

  std::istringstream in("not json\n" + mismatch + "\n\n   \n" + version + "\n" + range + "\n" +
                        empty_para + "\n[1,2]\n");
  const ParseResult r = parse_records(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.diagnostics.total_lines, 6u);  // blank lines not counted
  ASSERT_EQ(r.diagnostics.excluded.size(), 6u);
  EXPECT_EQ(r.diagnostics.excluded[0].reason, "malformed JSON");
  EXPECT_EQ(r.diagnostics.excluded[1].reason, "verdict/p_yes mismatch in image_original");
  EXPECT_EQ(r.diagnostics.excluded[2].line, 5u);
  EXPECT_EQ(r.diagnostics.excluded[2].reason, "unsupported schema_version");
  EXPECT_EQ(r.diagnostics.excluded[3].reason, "p_yes out of range in image_original");
  EXPECT_EQ(r.diagnostics.excluded[4].reason, "empty image_paraphrases");
  EXPECT_EQ(r.diagnostics.excluded[5].reason, "line is not an object");
}

TEST(ParseRecords, ThresholdOptionAppliesToDerivation) {
  std::istringstream in(kLine2);
  // With threshold 0.05 every probability-only pass of line 2 becomes yes;
  // the explicit null-image "no" is verdict-only and stays.
  const ParseResult r = parse_records(in, {0.05});
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].image_original.verdict, Verdict::kYes);
}

TEST(ParseRecords, UnreadableStreamThrows) {
  std::istringstream in("x");
  in.setstate(std::ios::badbit);
  EXPECT_THROW(parse_records(in), AuditError);
  EXPECT_THROW(parse_records_file("/nonexistent/log.jsonl"), AuditError);
}

// evaluable + excluded = total, and serialize/parse is the identity, over
// randomly corrupted synthetic logs.
TEST(ParseRecords, PropertyCountsAndRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    synth::ArchetypeSpec spec;
    spec.kind = synth::Archetype::kRandom;
    spec.n = 40;
    spec.k = 1 + seed % 5;
    spec.seed = seed;
    spec.include_swaps = seed % 3;
    spec.include_null = seed % 2 == 0;
    const auto records = synth::generate(spec);

    std::ostringstream out;
    write_records(out, records);
    std::istringstream back(out.str());
    const ParseResult clean = parse_records(back);
    EXPECT_EQ(clean.records, records);

    CounterRng rng(seed);
    std::string corrupted;
    std::istringstream lines(out.str());
    std::size_t dropped = 0;
    for (std::string line; std::getline(lines, line);) {
      if (rng.bernoulli(0.25)) {
        line = line.substr(0, line.size() / 2);
        ++dropped;
      }
      corrupted += line + "\n";
    }
    std::istringstream cin(corrupted);
    const ParseResult r = parse_records(cin);
    EXPECT_EQ(r.diagnostics.evaluable + r.diagnostics.excluded.size(), r.diagnostics.total_lines);
    EXPECT_EQ(r.diagnostics.excluded.size(), dropped);
  }
}

TEST(ValidateCohort, HandleCarriesNAndK) {
  const auto& fixture = testing::reference_cohort("MedGemma Base", "MIMIC");
  const Cohort c = validate_cohort(testing::build_records(fixture));
  EXPECT_EQ(c.n(), 98u);
  EXPECT_EQ(c.k(), 5u);
  EXPECT_EQ(c.model_id(), "MedGemma Base");
  EXPECT_EQ(c.dataset_id(), "MIMIC");
}

TEST(ValidateCohort, Errors) {
  auto records = testing::build_records(testing::reference_cohort("Full LoRA", "MIMIC"));
  auto expect_error = [](std::vector<SampleRecord> rs, const std::string& prefix) {
    try {
      validate_cohort(std::move(rs));
      FAIL() << "expected " << prefix;
    } catch (const AuditError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kValidation);
      EXPECT_EQ(std::string(e.what()).rfind(prefix, 0), 0u) << e.what();
    }
  };
  expect_error({}, "empty cohort");

  auto dup = records;
  dup[5].sample_id = dup[3].sample_id;
  expect_error(dup, "duplicate sample");

  auto mixed_k = records;
  mixed_k[7].image_paraphrases.pop_back();
  expect_error(mixed_k, "heterogeneous paraphrase count");

  auto mixed_model = records;
  mixed_model[2].model_id = "other";
  expect_error(mixed_model, "mixed model_id/dataset_id");
}

}  // namespace
}  // namespace quadaudit
