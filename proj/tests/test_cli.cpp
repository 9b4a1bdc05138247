#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "quadaudit/cli.hpp"
#include "support/reference_cohorts.hpp"

namespace quadaudit::cli {
namespace {

namespace fs = std::filesystem;
using quadaudit::testing::reference_cohort;
using quadaudit::testing::reference_cohorts;
using quadaudit::testing::write_log;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("quadaudit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (root_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return files;
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, AuditFlagsLlavaRadBasePadChest) {
  const std::string log = write_log(reference_cohort("LLaVA-Rad Base", "PadChest"), path("logs"));
  EXPECT_EQ(run_cli({"audit", "--input", log, "--out", path("out"), "--bootstrap", "200"}), kExitFlagged);
  for (const char* name : {"summary.md", "summary.json", "table1.csv", "table2.csv", "fig_scatter.csv",
                           "fig_stackedbar.csv", "fig_accuracy.csv", "fig_entropy.csv", "checklist.md",
                           "checklist.json", "diagnostics.csv"}) {
    EXPECT_TRUE(fs::exists(root_ / "out" / name)) << name;
  }
  const auto checklist = nlohmann::json::parse(slurp(root_ / "out" / "checklist.json"));
  EXPECT_EQ(checklist["overall"], "flagged");
}

TEST_F(CliTest, AuditPassesMedGemmaBasePadChest) {
  const std::string log = write_log(reference_cohort("MedGemma Base", "PadChest"), path("logs"));
  EXPECT_EQ(run_cli({"audit", "--input", log, "--out", path("out"), "--bootstrap", "100"}), kExitOk);
  EXPECT_EQ(run_cli({"audit", "--input", log, "--out", path("out2"), "--bootstrap", "100", "--gate", "0.05"}),
            kExitFlagged);
}

TEST_F(CliTest, AuditFormatFilter) {
  const std::string log = write_log(reference_cohort("MedGemma Base", "MIMIC"), path("logs"));
  ASSERT_EQ(run_cli({"audit", "--input", log, "--out", path("out"), "--bootstrap", "50", "--format", "json"}),
            kExitOk);
  for (const auto& [name, content] : tree(root_ / "out")) {
    if (name == "diagnostics.csv") continue;
    EXPECT_EQ(fs::path(name).extension(), ".json") << name;
  }
}

TEST_F(CliTest, InputErrorsExitTwo) {
  EXPECT_EQ(run_cli({"audit", "--input", path("missing.jsonl"), "--out", path("out")}), kExitInputError);
  EXPECT_NE(err_.str().find("missing.jsonl"), std::string::npos);
  EXPECT_EQ(run_cli({"audit", "--bogus"}), kExitInputError);
  EXPECT_EQ(run_cli({"nonsense"}), kExitInputError);
  EXPECT_EQ(run_cli({}), kExitInputError);

  std::ofstream(path("bad.jsonl")) << "{not json}\n";
  EXPECT_EQ(run_cli({"audit", "--input", path("bad.jsonl"), "--out", path("out")}), kExitInputError);
  EXPECT_NE(err_.str().find("bad.jsonl:1: excluded: malformed JSON"), std::string::npos) << err_.str();

  EXPECT_EQ(run_cli({"audit", "--input", path("bad.jsonl"), "--out", path("out"), "--kl-mode", "sideways"}),
            kExitInputError);
}

TEST_F(CliTest, AuditReportsExcludedLines) {
  const std::string log = write_log(reference_cohort("MedGemma Base", "MIMIC"), path("logs"));
  std::ofstream(log, std::ios::app) << "{\"schema_version\": 1}\n";
  ASSERT_EQ(run_cli({"audit", "--input", log, "--out", path("out"), "--bootstrap", "50"}), kExitOk);
  const std::string diag = slurp(root_ / "out" / "diagnostics.csv");
  EXPECT_NE(diag.find("99,"), std::string::npos) << diag;
  const auto summary = nlohmann::json::parse(slurp(root_ / "out" / "summary.json"));
  EXPECT_EQ(summary["summary"]["n"], 98);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::vector<std::string> base = {"simulate", "--archetype", "fragile-grounded", "--n", "300",
                                         "--flip-prob", "0.2", "--swaps", "5", "--null", "--seed", "9"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a.jsonl")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b.jsonl")});
  ASSERT_EQ(run_cli(a), kExitOk);
  ASSERT_EQ(run_cli(b), kExitOk);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_FALSE(slurp(path("a.jsonl")).empty());

  ASSERT_EQ(run_cli({"simulate", "--component", "text-shortcut:100", "--component", "random:50:0.7",
                     "--out", path("mix.jsonl")}),
            kExitOk);
  EXPECT_EQ(run_cli({"simulate", "--component", "unknown:10", "--out", path("x.jsonl")}), kExitInputError);
}

TEST_F(CliTest, SimulateAuditRecoversDesign) {
  ASSERT_EQ(run_cli({"simulate", "--archetype", "oracle-grounded", "--n", "98", "--out", path("o.jsonl")}),
            kExitOk);
  ASSERT_EQ(run_cli({"audit", "--input", path("o.jsonl"), "--out", path("o"), "--bootstrap", "50"}), kExitOk);
  const auto s = nlohmann::json::parse(slurp(root_ / "o" / "summary.json"));
  EXPECT_EQ(s["summary"]["distribution"]["counts"]["Ideal"], 98);
}

TEST_F(CliTest, CorrelateDetectRender) {
  std::vector<std::string> correlate = {"correlate", "--out", path("corr")};
  for (const auto& c : reference_cohorts()) {
    const std::string log = write_log(c, path("logs"));
    const std::string out = path("audit_" + quadaudit::testing::fixture_slug(c));
    const int code = run_cli({"audit", "--input", log, "--out", out, "--bootstrap", "50"});
    ASSERT_TRUE(code == kExitOk || code == kExitFlagged);
    correlate.insert(correlate.end(), {"--input", out + "/summary.json"});
  }
  ASSERT_EQ(run_cli(correlate), kExitOk) << err_.str();
  const auto r = nlohmann::json::parse(slurp(root_ / "corr" / "correlation.json"));
  EXPECT_NEAR(r["pearson_r"].get<double>(), -0.89, 0.02);
  EXPECT_TRUE(fs::exists(root_ / "corr" / "correlation.md"));

  const std::string log = path("logs/LLaVA-Rad_LoRA_PadChest.jsonl");
  ASSERT_EQ(run_cli({"detect", "--input", log, "--out", path("det"), "--population", "dangerous-vs-ideal"}),
            kExitOk)
      << err_.str();
  const auto d = nlohmann::json::parse(slurp(root_ / "det" / "detection.json"));
  EXPECT_EQ(d["population"], "dangerous-vs-ideal");

  std::vector<std::string> render = {"render", "--out", path("render")};
  for (std::size_t i = 4; i < correlate.size(); i += 2) render.insert(render.end(), {"--input", correlate[i]});
  ASSERT_EQ(run_cli(render), kExitOk) << err_.str();
  const std::string table1 = slurp(root_ / "render" / "table1.csv");
  EXPECT_NE(table1.find("LLaVA-Rad Base,PadChest,732,0,5,721,6"), std::string::npos);
}

TEST_F(CliTest, OutputTreesAreByteIdentical) {
  const std::string log = write_log(reference_cohort("Full LoRA", "PadChest"), path("logs"));
  for (const char* dir : {"first", "second"}) {
    run_cli({"audit", "--input", log, "--out", path(dir), "--bootstrap", "300", "--seed", "5"});
  }
  EXPECT_EQ(tree(root_ / "first"), tree(root_ / "second"));
  run_cli({"audit", "--input", log, "--out", path("third"), "--bootstrap", "300", "--seed", "6"});
  EXPECT_NE(tree(root_ / "first"), tree(root_ / "third"));
}

}  // namespace
}  // namespace quadaudit::cli
