#include "quadaudit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "quadaudit/error.hpp"
#include "quadaudit/grounding.hpp"
#include "quadaudit/records.hpp"
#include "quadaudit/report.hpp"
#include "quadaudit/seeding.hpp"
#include "quadaudit/synthcohort.hpp"
#include "quadaudit/taxonomy.hpp"

namespace quadaudit::cli {

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string out;
  std::uint64_t seed = 42;
  std::size_t bootstrap = 2000;
  double level = 0.95;
  double threshold = kDefaultThreshold;
  std::size_t min_finding_n = metrics::kDefaultMinFindingN;
  std::string kl_mode = "forward";
  std::string population = "dangerous-vs-rest";
  double gate = 0.5;
  double advisory = 0.25;
  std::string format = "all";
  bool strict_reliance = false;
};

struct SimulateConfig {
  std::string archetype = "text-shortcut";
  std::size_t n = 100;
  std::size_t k = 5;
  double gt_yes_rate = 0.5;
  double flip_prob = 0.2;
  double confidence = 0.9;
  std::size_t swaps = 0;
  bool null_image = false;
  std::string answer = "yes";
  std::string model_id = "synthetic";
  std::string dataset_id = "synthetic";
  std::vector<std::string> components;
};

std::vector<report::Format> parse_formats(const std::string& name) {
  using report::Format;
  if (name == "all") return {Format::kMarkdown, Format::kCsv, Format::kJson};
  if (name == "markdown") return {Format::kMarkdown};
  if (name == "csv") return {Format::kCsv};
  if (name == "json") return {Format::kJson};
  throw AuditError(ErrorKind::kInput, "unknown --format " + name);
}

stats::BootstrapOptions bootstrap_options(const RunConfig& c) {
  return {c.bootstrap, c.level, c.seed};
}

TaxonomyOptions taxonomy_options(const RunConfig& c) {
  auto mode = parse_kl_mode(c.kl_mode);
  if (!mode) throw AuditError(ErrorKind::kInput, "unknown --kl-mode " + c.kl_mode);
  return {c.strict_reliance, *mode};
}

grounding::Population population(const RunConfig& c) {
  auto p = grounding::parse_population(c.population);
  if (!p) throw AuditError(ErrorKind::kInput, "unknown --population " + c.population);
  return *p;
}

std::string diagnostics_csv(const IngestDiagnostics& d) {
  std::string out = "line,reason\n";
  for (const auto& e : d.excluded) {
    out += std::to_string(e.line) + "," + report::csv_field(e.reason) + "\n";
  }
  return out;
}

// Reads, reports exclusions, validates.
Cohort load_cohort(const RunConfig& c, std::ostream& err, IngestDiagnostics* diag_out) {
  if (c.inputs.size() != 1) throw AuditError(ErrorKind::kInput, "expected exactly one --input");
  ParseResult parsed = parse_records_file(c.inputs.front(), {c.threshold});
  for (const auto& e : parsed.diagnostics.excluded) {
    err << c.inputs.front() << ":" << e.line << ": excluded: " << e.reason << "\n";
  }
  if (diag_out) *diag_out = parsed.diagnostics;
  return Cohort::validate(std::move(parsed.records));
}

int cmd_audit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  IngestDiagnostics diag;
  const Cohort cohort = load_cohort(c, err, &diag);
  const auto audits = audit_cohort(cohort, taxonomy_options(c));
  report::SummaryOptions opts{bootstrap_options(c), c.min_finding_n, population(c)};
  const report::CohortReport rep = report::summarize(cohort, audits, opts);
  const report::ChecklistVerdict verdict = report::checklist(rep.summary, {c.gate, c.advisory});

  const auto formats = parse_formats(c.format);
  std::vector<report::OutputFile> files = report::render(rep, formats);
  for (auto& f : report::render(verdict, formats)) files.push_back(std::move(f));
  files.push_back({"diagnostics.csv", diagnostics_csv(diag)});
  report::write_outputs(c.out, files);

  out << rep.summary.label() << ": n=" << rep.summary.n << " evaluable of "
      << diag.total_lines << ", flip rate " << report::format_percent(rep.summary.flip_rate.value)
      << "%, Dangerous " << report::format_percent(rep.summary.dangerous_fraction.value)
      << "%, checklist " << (verdict.flagged ? "FLAGGED" : "PASS") << "\n";
  return verdict.flagged ? kExitFlagged : kExitOk;
}

std::vector<metrics::CohortSummary> load_summaries(const RunConfig& c) {
  if (c.inputs.empty()) throw AuditError(ErrorKind::kInput, "expected at least one --input");
  std::vector<metrics::CohortSummary> summaries;
  for (const auto& path : c.inputs) summaries.push_back(report::read_report_file(path).summary);
  return summaries;
}

int cmd_correlate(const RunConfig& c, std::ostream& out) {
  const auto summaries = load_summaries(c);
  const report::CorrelationReport corr = report::correlate(summaries);
  const auto formats = parse_formats(c.format);
  std::vector<report::OutputFile> files = report::render(corr, formats);
  if (std::find(formats.begin(), formats.end(), report::Format::kCsv) != formats.end()) {
    files.push_back({"fig_scatter.csv", report::fig_scatter_csv(summaries)});
  }
  report::write_outputs(c.out, files);
  out << "cohorts=" << corr.n_points << " pearson_r=" << corr.pearson_r
      << " spearman_rho=" << corr.spearman_rho << (corr.small_sample ? " (n too small for inference)" : "")
      << "\n";
  return kExitOk;
}

int cmd_detect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Cohort cohort = load_cohort(c, err, nullptr);
  const auto audits = audit_cohort(cohort, taxonomy_options(c));
  const grounding::DetectionReport det = grounding::kl_detection(audits, population(c));
  const std::string label = cohort.model_id() + " / " + cohort.dataset_id();
  std::vector<report::OutputFile> files;
  const auto formats = parse_formats(c.format);
  if (std::find(formats.begin(), formats.end(), report::Format::kMarkdown) != formats.end()) {
    files.push_back({"detection.md", report::detection_markdown(det, label)});
  }
  if (std::find(formats.begin(), formats.end(), report::Format::kJson) != formats.end()) {
    files.push_back({"detection.json", report::to_json(det).dump(2) + "\n"});
  }
  report::write_outputs(c.out, files);
  out << label << ": AUROC (" << to_string(det.population) << ") = " << det.auroc() << "\n";
  return kExitOk;
}

synth::ArchetypeSpec base_spec(const SimulateConfig& s, std::uint64_t seed) {
  synth::ArchetypeSpec spec;
  auto kind = synth::parse_archetype(s.archetype);
  if (!kind) throw AuditError(ErrorKind::kInput, "unknown --archetype " + s.archetype);
  auto answer = parse_verdict(s.answer);
  if (!answer) throw AuditError(ErrorKind::kInput, "--answer must be yes or no");
  spec.kind = *kind;
  spec.n = s.n;
  spec.k = s.k;
  spec.gt_yes_rate = s.gt_yes_rate;
  spec.paraphrase_flip_prob = s.flip_prob;
  spec.confidence = s.confidence;
  spec.seed = seed;
  spec.include_swaps = s.swaps;
  spec.include_null = s.null_image;
  spec.shortcut_answer = *answer;
  spec.model_id = s.model_id;
  spec.dataset_id = s.dataset_id;
  return spec;
}

// "kind:n[:confidence[:flip_prob]]"
synth::ArchetypeSpec parse_component(const std::string& text, synth::ArchetypeSpec spec,
                                     std::size_t index) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() < 2 || parts.size() > 4) {
    throw AuditError(ErrorKind::kInput, "--component expects kind:n[:confidence[:flip_prob]]");
  }
  auto kind = synth::parse_archetype(parts[0]);
  if (!kind) throw AuditError(ErrorKind::kInput, "unknown archetype in --component " + text);
  try {
    spec.kind = *kind;
    spec.n = std::stoul(parts[1]);
    if (parts.size() > 2) spec.confidence = std::stod(parts[2]);
    if (parts.size() > 3) spec.paraphrase_flip_prob = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw AuditError(ErrorKind::kInput, "malformed --component " + text);
  }
  spec.seed = derive_seed(spec.seed, "component", index);
  spec.id_prefix = parts[0] + "-" + std::to_string(index);
  return spec;
}

int cmd_simulate(const RunConfig& c, const SimulateConfig& s, std::ostream& out) {
  const synth::ArchetypeSpec spec = base_spec(s, c.seed);
  std::vector<SampleRecord> records;
  if (s.components.empty()) {
    records = synth::generate(spec);
  } else {
    std::vector<synth::ArchetypeSpec> parts;
    for (std::size_t i = 0; i < s.components.size(); ++i) {
      parts.push_back(parse_component(s.components[i], spec, i));
    }
    records = synth::generate_mixture(parts);
  }
  std::ostringstream buf;
  write_records(buf, records);
  const std::filesystem::path parent = std::filesystem::path(c.out).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  file << buf.str();
  file.close();
  if (!file) throw AuditError(ErrorKind::kIo, "cannot write " + c.out);
  out << "wrote " << records.size() << " records to " << c.out << "\n";
  return kExitOk;
}

int cmd_render(const RunConfig& c, std::ostream& out) {
  if (c.inputs.empty()) throw AuditError(ErrorKind::kInput, "expected at least one --input");
  std::vector<report::CohortReport> reports;
  for (const auto& path : c.inputs) reports.push_back(report::read_report_file(path));
  std::vector<metrics::CohortSummary> summaries;
  for (const auto& r : reports) summaries.push_back(r.summary);
  const auto formats = parse_formats(c.format);
  std::vector<report::OutputFile> files = report::render_tables(summaries, formats);
  bool flagged = false;
  std::string checklists;
  for (const auto& r : reports) {
    const auto verdict = report::checklist(r.summary, {c.gate, c.advisory});
    flagged = flagged || verdict.flagged;
    checklists += report::checklist_markdown(verdict) + "\n";
  }
  if (std::find(formats.begin(), formats.end(), report::Format::kMarkdown) != formats.end()) {
    files.push_back({"checklist.md", checklists});
  }
  report::write_outputs(c.out, files);
  out << "rendered " << reports.size() << " summaries" << (flagged ? " (some flagged)" : "")
      << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& c, bool needs_input = true) {
  if (needs_input) sub->add_option("--input", c.inputs, "Input file(s)")->required();
  sub->add_option("--out", c.out, "Output directory (file for simulate)")->required();
  sub->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  sub->add_option("--format", c.format, "all | markdown | csv | json")->capture_default_str();
}

void add_audit_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--bootstrap", c.bootstrap, "Bootstrap resamples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--level", c.level, "Confidence level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--threshold", c.threshold, "p_yes threshold for derived verdicts")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--min-finding-n", c.min_finding_n, "Minimum samples per reported finding")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--kl-mode", c.kl_mode, "forward | symmetric")->capture_default_str();
  sub->add_option("--population", c.population, "dangerous-vs-rest | dangerous-vs-ideal")
      ->capture_default_str();
  sub->add_option("--gate", c.gate, "Flag Dangerous fraction above this value")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_flag("--strict-reliance", c.strict_reliance,
                "Require every paraphrase to differ from the text-only verdict");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-quadrant consistency and image-reliance audit", "quadaudit"};
  app.require_subcommand(1);
  RunConfig config;
  SimulateConfig sim;

  auto* audit = app.add_subcommand("audit", "Audit one cohort log");
  add_common(audit, config);
  add_audit_options(audit, config);

  auto* correlate = app.add_subcommand("correlate", "Correlate flip rate and Dangerous fraction");
  add_common(correlate, config);

  auto* detect = app.add_subcommand("detect", "KL-based Dangerous detection report");
  add_common(detect, config);
  add_audit_options(detect, config);

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic cohort log");
  add_common(simulate, config, /*needs_input=*/false);
  simulate->add_option("--archetype", sim.archetype,
                       "text-shortcut | oracle-grounded | fragile-grounded | random")
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Samples")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--k", sim.k, "Paraphrases per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--gt-yes-rate", sim.gt_yes_rate, "Fraction of yes ground truth")
      ->capture_default_str();
  simulate->add_option("--flip-prob", sim.flip_prob, "Per-paraphrase flip probability")
      ->capture_default_str();
  simulate->add_option("--confidence", sim.confidence, "p_yes magnitude of confident verdicts")
      ->capture_default_str();
  simulate->add_option("--swaps", sim.swaps, "Swap passes per sample")->capture_default_str();
  simulate->add_flag("--null", sim.null_image, "Emit a null-image pass");
  simulate->add_option("--answer", sim.answer, "Fixed answer of the text-shortcut archetype")
      ->capture_default_str();
  simulate->add_option("--model-id", sim.model_id)->capture_default_str();
  simulate->add_option("--dataset-id", sim.dataset_id)->capture_default_str();
  simulate->add_option("--component", sim.components,
                       "Mixture component kind:n[:confidence[:flip_prob]] (repeatable)");

  auto* render = app.add_subcommand("render", "Re-render stored summaries");
  add_common(render, config);
  render->add_option("--gate", config.gate, "Checklist gate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (audit->parsed()) return cmd_audit(config, out, err);
    if (correlate->parsed()) return cmd_correlate(config, out);
    if (detect->parsed()) return cmd_detect(config, out, err);
    if (simulate->parsed()) return cmd_simulate(config, sim, out);
    if (render->parsed()) return cmd_render(config, out);
  } catch (const AuditError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace quadaudit::cli
