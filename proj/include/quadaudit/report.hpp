#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadaudit/grounding.hpp"
#include "quadaudit/metrics.hpp"
#include "quadaudit/records.hpp"

namespace quadaudit::report {

struct SummaryOptions {
  stats::BootstrapOptions bootstrap;
  std::size_t min_finding_n = metrics::kDefaultMinFindingN;
  grounding::Population population = grounding::Population::kDangerousVsRest;
};

/// Metrics plus whatever grounding checks the logs support.
struct CohortReport {
  metrics::CohortSummary summary;
  std::vector<metrics::FindingRow> findings;
  std::optional<grounding::DetectionReport> detection;  // absent if single-class or no KL
  grounding::SwapReport grounding;                      // coverage 0 when absent
};

CohortReport summarize(const Cohort& cohort, std::span<const SampleAudit> audits,
                       const SummaryOptions& options = {});

// ---------------------------------------------------------------------------
// Cross-cohort correlation

struct CorrelationReport {
  stats::PointSet points;  // (flip rate, Dangerous fraction), sorted by label
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n_points = 0;
  bool small_sample = false;  // fewer than 3 points: correlation forced to +-1
};

/// Points are ordered by cohort label before computing, so the result does
/// not depend on input order. Throws AuditError(kUndefined) on zero variance.
CorrelationReport correlate(std::span<const metrics::CohortSummary> summaries);

// ---------------------------------------------------------------------------
// Deployment checklist

enum class StepStatus { kDone, kFlagged };

struct ChecklistStep {
  std::string name;
  StepStatus status = StepStatus::kDone;
  std::string detail;
};

struct ChecklistOptions {
  double gate = 0.5;      // flag when Dangerous fraction > gate
  double advisory = 0.25; // warn when Dangerous fraction > advisory
};

struct ChecklistVerdict {
  std::string cohort;
  std::vector<ChecklistStep> steps;  // always five, in order
  bool flagged = false;
  bool advisory_warning = false;
  double dangerous_fraction = 0.0;
  ChecklistOptions options;
};

ChecklistVerdict checklist(const metrics::CohortSummary& summary,
                           const ChecklistOptions& options = {});

// ---------------------------------------------------------------------------
// Rendering

enum class Format { kMarkdown, kCsv, kJson };

struct OutputFile {
  std::string name;
  std::string content;

  friend bool operator==(const OutputFile&, const OutputFile&) = default;
};

/// Percent with one decimal, half-up on the unrounded fraction.
std::string format_percent(double fraction);
std::string format_percent(const std::optional<double>& fraction);  // "--" when absent

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

std::string table1_markdown(std::span<const metrics::CohortSummary> summaries);
std::string table1_csv(std::span<const metrics::CohortSummary> summaries);
std::string table2_markdown(std::span<const metrics::CohortSummary> summaries);
std::string table2_csv(std::span<const metrics::CohortSummary> summaries);

std::string summary_markdown(const CohortReport& report);
std::string checklist_markdown(const ChecklistVerdict& verdict);
std::string correlation_markdown(const CorrelationReport& report);
std::string detection_markdown(const grounding::DetectionReport& detection,
                               const std::string& cohort);

nlohmann::ordered_json to_json(const metrics::CohortSummary& summary);
nlohmann::ordered_json to_json(const CohortReport& report);
nlohmann::ordered_json to_json(const CorrelationReport& report);
nlohmann::ordered_json to_json(const ChecklistVerdict& verdict);
nlohmann::ordered_json to_json(const grounding::DetectionReport& detection);

/// Inverse of to_json; throws AuditError(kInput) on a malformed document.
metrics::CohortSummary summary_from_json(const nlohmann::json& j);
CohortReport report_from_json(const nlohmann::json& j);
CohortReport read_report_file(const std::string& path);

/// Figure-ready data files.
std::string fig_stackedbar_csv(std::span<const metrics::CohortSummary> summaries);
std::string fig_scatter_csv(std::span<const metrics::CohortSummary> summaries);
std::string fig_accuracy_csv(std::span<const metrics::CohortSummary> summaries);
std::string fig_entropy_csv(std::span<const metrics::CohortSummary> summaries);

std::vector<OutputFile> plot_data(std::span<const metrics::CohortSummary> summaries);

/// File sets per renderable value, filtered to the requested formats.
std::vector<OutputFile> render(const CohortReport& report, std::span<const Format> formats);
std::vector<OutputFile> render(const CorrelationReport& report, std::span<const Format> formats);
std::vector<OutputFile> render(const ChecklistVerdict& verdict, std::span<const Format> formats);
std::vector<OutputFile> render_tables(std::span<const metrics::CohortSummary> summaries,
                                      std::span<const Format> formats);

/// Writes each file under `directory` (created if needed). Throws
/// AuditError(kIo) when a destination is unwritable.
void write_outputs(const std::string& directory, std::span<const OutputFile> files);

}  // namespace quadaudit::report
