#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quadaudit {

enum class Verdict : unsigned char { kNo = 0, kYes = 1 };

constexpr Verdict operator!(Verdict v) noexcept {
  return v == Verdict::kYes ? Verdict::kNo : Verdict::kYes;
}

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

constexpr double kDefaultThreshold = 0.5;

/// yes iff p_yes >= threshold. Throws AuditError(kInput) outside [0,1].
Verdict derive_verdict(double p_yes, double threshold = kDefaultThreshold);

/// One forward pass. A pass read from a verdict-only log line carries no
/// probability; every pass carries a verdict.
struct Pass {
  Verdict verdict = Verdict::kNo;
  std::optional<double> p_yes;

  static Pass from_probability(double p_yes, double threshold = kDefaultThreshold);

  friend bool operator==(const Pass&, const Pass&) = default;
};

struct SampleRecord {
  std::string sample_id;
  std::string model_id;
  std::string dataset_id;
  std::string question;
  std::optional<std::string> finding;
  Verdict ground_truth = Verdict::kNo;

  Pass image_original;
  std::vector<Pass> image_paraphrases;
  Pass text_only;
  std::optional<std::vector<Pass>> swap_passes;
  std::optional<Pass> null_image;

  std::size_t paraphrase_count() const noexcept { return image_paraphrases.size(); }

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct ExcludedLine {
  std::size_t line = 0;  // 1-based physical line number
  std::string reason;

  friend bool operator==(const ExcludedLine&, const ExcludedLine&) = default;
};

struct IngestDiagnostics {
  std::size_t total_lines = 0;
  std::size_t evaluable = 0;
  std::vector<ExcludedLine> excluded;
};

struct ParseOptions {
  double threshold = kDefaultThreshold;
};

struct ParseResult {
  std::vector<SampleRecord> records;
  IngestDiagnostics diagnostics;
};

/// Reads one record per line. Whitespace-only lines are skipped and not
/// counted. Per-line problems go to diagnostics; only an unreadable stream
/// throws.
ParseResult parse_records(std::istream& in, const ParseOptions& options = {});
ParseResult parse_records_file(const std::string& path, const ParseOptions& options = {});

/// Parses one line. Returns the record, or the exclusion reason.
struct LineResult {
  std::optional<SampleRecord> record;
  std::string reason;
};
LineResult parse_record_line(std::string_view line, const ParseOptions& options = {});

/// Serializes a record as a single line (no trailing newline).
std::string serialize_record(const SampleRecord& record);
void write_records(std::ostream& out, const std::vector<SampleRecord>& records);

/// A cohort whose records share one model, one dataset and one paraphrase
/// count, with unique sample ids.
class Cohort {
 public:
  /// Throws AuditError(kValidation) with "empty cohort",
  /// "heterogeneous paraphrase count", "duplicate sample" or
  /// "mixed model_id/dataset_id".
  static Cohort validate(std::vector<SampleRecord> records);

  std::size_t n() const noexcept { return records_.size(); }
  std::size_t k() const noexcept { return k_; }
  const std::string& model_id() const noexcept { return records_.front().model_id; }
  const std::string& dataset_id() const noexcept { return records_.front().dataset_id; }
  const std::vector<SampleRecord>& records() const noexcept { return records_; }

 private:
  Cohort(std::vector<SampleRecord> records, std::size_t k)
      : records_(std::move(records)), k_(k) {}

  std::vector<SampleRecord> records_;
  std::size_t k_;
};

inline Cohort validate_cohort(std::vector<SampleRecord> records) {
  return Cohort::validate(std::move(records));
}

}  // namespace quadaudit
