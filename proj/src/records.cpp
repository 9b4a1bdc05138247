#include "quadaudit/records.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "quadaudit/error.hpp"

namespace quadaudit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Carries the exclusion reason out of the field readers.
struct LineError {
  std::string reason;
};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LineError{std::string("missing ") + key};
  return *it;
}

std::string read_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw LineError{std::string("invalid ") + key};
  return v.get<std::string>();
}

Verdict read_verdict_value(const json& v, const std::string& field) {
  if (!v.is_string()) throw LineError{"invalid verdict in " + field};
  auto parsed = parse_verdict(v.get<std::string>());
  if (!parsed) throw LineError{"invalid verdict in " + field};
  return *parsed;
}

Pass read_pass(const json& v, const std::string& field, double threshold) {
  if (!v.is_object()) throw LineError{"invalid " + field};
  auto vit = v.find("verdict");
  auto pit = v.find("p_yes");
  if (vit == v.end() && pit == v.end()) {
    throw LineError{"missing verdict and p_yes in " + field};
  }
  Pass pass;
  if (pit != v.end()) {
    if (!pit->is_number()) throw LineError{"invalid p_yes in " + field};
    double p = pit->get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw LineError{"p_yes out of range in " + field};
    pass.p_yes = p;
  }
  if (vit != v.end()) {
    pass.verdict = read_verdict_value(*vit, field);
    if (pass.p_yes && derive_verdict(*pass.p_yes, threshold) != pass.verdict) {
      throw LineError{"verdict/p_yes mismatch in " + field};
    }
  } else {
    pass.verdict = derive_verdict(*pass.p_yes, threshold);
  }
  return pass;
}

std::vector<Pass> read_pass_array(const json& v, const std::string& field, double threshold,
                                  bool require_nonempty) {
  if (!v.is_array()) throw LineError{"invalid " + field};
  if (require_nonempty && v.empty()) throw LineError{"empty " + field};
  std::vector<Pass> passes;
  passes.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    passes.push_back(read_pass(v[i], field + "[" + std::to_string(i) + "]", threshold));
  }
  return passes;
}

SampleRecord read_record(const json& obj, double threshold) {
  if (!obj.is_object()) throw LineError{"line is not an object"};
  const json& version = require(obj, "schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    throw LineError{"unsupported schema_version"};
  }
  SampleRecord r;
  r.sample_id = read_string(obj, "sample_id");
  r.model_id = read_string(obj, "model_id");
  r.dataset_id = read_string(obj, "dataset_id");
  r.question = read_string(obj, "question");
  if (obj.contains("finding")) r.finding = read_string(obj, "finding");
  r.ground_truth = read_verdict_value(require(obj, "ground_truth"), "ground_truth");
  r.image_original = read_pass(require(obj, "image_original"), "image_original", threshold);
  r.image_paraphrases =
      read_pass_array(require(obj, "image_paraphrases"), "image_paraphrases", threshold, true);
  r.text_only = read_pass(require(obj, "text_only"), "text_only", threshold);
  if (auto it = obj.find("swap_passes"); it != obj.end()) {
    r.swap_passes = read_pass_array(*it, "swap_passes", threshold, false);
  }
  if (auto it = obj.find("null_image"); it != obj.end()) {
    r.null_image = read_pass(*it, "null_image", threshold);
  }
  return r;
}

ordered_json pass_to_json(const Pass& p) {
  ordered_json j;
  j["verdict"] = to_string(p.verdict);
  if (p.p_yes) j["p_yes"] = *p.p_yes;
  return j;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept { return v == Verdict::kYes ? "yes" : "no"; }

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
  if (text == "yes") return Verdict::kYes;
  if (text == "no") return Verdict::kNo;
  return std::nullopt;
}

Verdict derive_verdict(double p_yes, double threshold) {
  if (!(p_yes >= 0.0 && p_yes <= 1.0)) {
    throw AuditError(ErrorKind::kInput, "p_yes out of range [0,1]");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw AuditError(ErrorKind::kInput, "threshold out of range [0,1]");
  }
  return p_yes >= threshold ? Verdict::kYes : Verdict::kNo;
}

Pass Pass::from_probability(double p_yes, double threshold) {
  return Pass{derive_verdict(p_yes, threshold), p_yes};
}

LineResult parse_record_line(std::string_view line, const ParseOptions& options) {
  json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) return {std::nullopt, "malformed JSON"};
  try {
    return {read_record(obj, options.threshold), {}};
  } catch (const LineError& e) {
    return {std::nullopt, e.reason};
  }
}

ParseResult parse_records(std::istream& in, const ParseOptions& options) {
  if (!in) throw AuditError(ErrorKind::kIo, "input stream is not readable");
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.diagnostics.total_lines;
    LineResult parsed = parse_record_line(line, options);
    if (parsed.record) {
      result.records.push_back(std::move(*parsed.record));
      ++result.diagnostics.evaluable;
    } else {
      result.diagnostics.excluded.push_back({line_no, std::move(parsed.reason)});
    }
  }
  if (in.bad()) throw AuditError(ErrorKind::kIo, "read error on input stream");
  return result;
}

ParseResult parse_records_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AuditError(ErrorKind::kIo, "cannot open " + path);
  return parse_records(in, options);
}

std::string serialize_record(const SampleRecord& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["sample_id"] = r.sample_id;
  j["model_id"] = r.model_id;
  j["dataset_id"] = r.dataset_id;
  j["question"] = r.question;
  if (r.finding) j["finding"] = *r.finding;
  j["ground_truth"] = to_string(r.ground_truth);
  j["image_original"] = pass_to_json(r.image_original);
  j["image_paraphrases"] = ordered_json::array();
  for (const Pass& p : r.image_paraphrases) j["image_paraphrases"].push_back(pass_to_json(p));
  j["text_only"] = pass_to_json(r.text_only);
  if (r.swap_passes) {
    j["swap_passes"] = ordered_json::array();
    for (const Pass& p : *r.swap_passes) j["swap_passes"].push_back(pass_to_json(p));
  }
  if (r.null_image) j["null_image"] = pass_to_json(*r.null_image);
  return j.dump();
}

void write_records(std::ostream& out, const std::vector<SampleRecord>& records) {
  for (const SampleRecord& r : records) out << serialize_record(r) << '\n';
}

Cohort Cohort::validate(std::vector<SampleRecord> records) {
  if (records.empty()) throw AuditError(ErrorKind::kValidation, "empty cohort");
  const std::size_t k = records.front().paraphrase_count();
  const std::string& model = records.front().model_id;
  const std::string& dataset = records.front().dataset_id;
  std::unordered_set<std::string> seen;
  seen.reserve(records.size());
  for (const SampleRecord& r : records) {
    if (r.paraphrase_count() != k || k == 0) {
      throw AuditError(ErrorKind::kValidation,
                       "heterogeneous paraphrase count at sample " + r.sample_id);
    }
    if (r.model_id != model || r.dataset_id != dataset) {
      throw AuditError(ErrorKind::kValidation, "mixed model_id/dataset_id at sample " + r.sample_id);
    }
    if (!seen.insert(r.sample_id).second) {
      throw AuditError(ErrorKind::kValidation, "duplicate sample " + r.sample_id);
    }
  }
  return Cohort(std::move(records), k);
}

}  // namespace quadaudit
