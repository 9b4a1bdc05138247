#include "quadaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "quadaudit/error.hpp"

namespace quadaudit::report {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using metrics::CohortSummary;

constexpr const char* kReportFormat = "quadaudit-summary";
constexpr int kReportVersion = 1;

std::string fixed(double v, int digits) {
  if (v == 0.0) v = 0.0;  // no "-0.000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits, const char* absent = "") {
  return v ? fixed(*v, digits) : std::string(absent);
}

bool has_format(std::span<const Format> formats, Format f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <class T, class F>
ordered_json quadrant_object(const QuadrantMap<T>& map, F&& convert) {
  ordered_json j = ordered_json::object();
  for (Quadrant q : kAllQuadrants) j[std::string(to_string(q))] = convert(map[index_of(q)]);
  return j;
}

ordered_json rate_json(const metrics::Rate& r) {
  ordered_json j;
  j["value"] = r.value;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  j["ci"] = {{"low", r.ci.low},
             {"high", r.ci.high},
             {"level", r.ci.level},
             {"resamples", r.ci.resamples},
             {"seed", r.ci.seed}};
  return j;
}

ordered_json describe_json(const std::optional<stats::Describe>& d) {
  if (!d) return nullptr;
  ordered_json j;
  j["count"] = d->count;
  j["mean"] = d->mean;
  j["sd"] = optional_json(d->sd);
  j["min"] = d->min;
  j["q1"] = d->q1;
  j["median"] = d->median;
  j["q3"] = d->q3;
  j["max"] = d->max;
  return j;
}

ordered_json swap_json(const grounding::SwapReport& s) {
  ordered_json j;
  j["has_swaps"] = s.has_swaps;
  j["swap_coverage"] = s.swap_coverage;
  j["has_null"] = s.has_null;
  j["null_coverage"] = s.null_coverage;
  j["invariant_rate"] = quadrant_object(s.invariant_rate, optional_json);
  j["per_swap_agreement"] = quadrant_object(s.per_swap_agreement, optional_json);
  j["null_agreement_rate"] = quadrant_object(s.null_agreement_rate, optional_json);
  return j;
}

// ---- JSON readers ----------------------------------------------------------

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

template <class T, class F>
QuadrantMap<T> read_quadrant_object(const json& j, F&& convert) {
  QuadrantMap<T> map{};
  for (Quadrant q : kAllQuadrants) map[index_of(q)] = convert(j.at(std::string(to_string(q))));
  return map;
}

metrics::Rate read_rate(const json& j) {
  metrics::Rate r;
  r.value = j.at("value").get<double>();
  r.numerator = j.at("numerator").get<std::size_t>();
  r.denominator = j.at("denominator").get<std::size_t>();
  const json& ci = j.at("ci");
  r.ci.low = ci.at("low").get<double>();
  r.ci.high = ci.at("high").get<double>();
  r.ci.level = ci.at("level").get<double>();
  r.ci.resamples = ci.at("resamples").get<std::size_t>();
  r.ci.seed = ci.at("seed").get<std::uint64_t>();
  return r;
}

std::optional<stats::Describe> read_describe(const json& j) {
  if (j.is_null()) return std::nullopt;
  stats::Describe d;
  d.count = j.at("count").get<std::size_t>();
  d.mean = j.at("mean").get<double>();
  d.sd = read_optional(j.at("sd"));
  d.min = j.at("min").get<double>();
  d.q1 = j.at("q1").get<double>();
  d.median = j.at("median").get<double>();
  d.q3 = j.at("q3").get<double>();
  d.max = j.at("max").get<double>();
  return d;
}

grounding::SwapReport read_swap(const json& j) {
  grounding::SwapReport s;
  s.has_swaps = j.at("has_swaps").get<bool>();
  s.swap_coverage = j.at("swap_coverage").get<double>();
  s.has_null = j.at("has_null").get<bool>();
  s.null_coverage = j.at("null_coverage").get<double>();
  s.invariant_rate = read_quadrant_object<std::optional<double>>(j.at("invariant_rate"), read_optional);
  s.per_swap_agreement =
      read_quadrant_object<std::optional<double>>(j.at("per_swap_agreement"), read_optional);
  s.null_agreement_rate =
      read_quadrant_object<std::optional<double>>(j.at("null_agreement_rate"), read_optional);
  return s;
}

grounding::DetectionReport read_detection(const json& j) {
  grounding::DetectionReport d;
  auto population = grounding::parse_population(j.at("population").get<std::string>());
  if (!population) throw AuditError(ErrorKind::kInput, "unknown detection population");
  d.population = *population;
  d.scored = j.at("scored").get<std::size_t>();
  d.clamped_count = j.at("clamped_count").get<std::size_t>();
  d.auroc_dangerous_vs_rest = read_optional(j.at("auroc_dangerous_vs_rest"));
  d.auroc_dangerous_vs_ideal = read_optional(j.at("auroc_dangerous_vs_ideal"));
  d.mean_kl_by_quadrant = read_quadrant_object<std::optional<grounding::MeanSd>>(
      j.at("mean_kl_by_quadrant"), [](const json& v) -> std::optional<grounding::MeanSd> {
        if (v.is_null()) return std::nullopt;
        return grounding::MeanSd{v.at("count").get<std::size_t>(), v.at("mean").get<double>(),
                                 read_optional(v.at("sd"))};
      });
  return d;
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw AuditError(ErrorKind::kInput, std::string("malformed summary document: ") + e.what());
  }
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string row = "|";
  for (const auto& c : cells) row += " " + c + " |";
  return row + "\n";
}

std::string md_rule(std::size_t columns, std::size_t left_aligned) {
  std::string row = "|";
  for (std::size_t i = 0; i < columns; ++i) row += i < left_aligned ? " --- |" : " ---: |";
  return row + "\n";
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) row += ',';
    row += csv_field(cells[i]);
  }
  return row + "\n";
}

std::string ci_text(const metrics::Rate& r) {
  return format_percent(r.value) + "% (" + std::to_string(r.numerator) + "/" +
         std::to_string(r.denominator) + "; " + fixed(r.ci.level * 100.0, 0) + "% CI " +
         format_percent(r.ci.low) + " to " + format_percent(r.ci.high) + "%, B=" +
         std::to_string(r.ci.resamples) + ")";
}

std::vector<std::string> table1_cells(const CohortSummary& s, bool markdown) {
  std::vector<std::string> cells = {s.model_id, s.dataset_id, std::to_string(s.n)};
  for (Quadrant q : kAllQuadrants) cells.push_back(std::to_string(s.distribution.count(q)));
  for (Quadrant q : kAllQuadrants) {
    std::string pct = format_percent(s.distribution.fraction(q));
    if (markdown && q == Quadrant::kDangerous && s.distribution.fraction(q) > 0.5) {
      pct = "**" + pct + "**";
    }
    cells.push_back(pct);
  }
  return cells;
}

std::vector<std::string> table2_cells(const CohortSummary& s) {
  std::vector<std::string> cells = {s.model_id, s.dataset_id};
  for (Quadrant q : kAllQuadrants) cells.push_back(format_percent(s.accuracy.accuracy[index_of(q)]));
  cells.push_back(format_percent(s.accuracy.overall));
  return cells;
}

}  // namespace

// ---------------------------------------------------------------------------

CohortReport summarize(const Cohort& cohort, std::span<const SampleAudit> audits,
                       const SummaryOptions& options) {
  if (audits.size() != cohort.n()) {
    throw AuditError(ErrorKind::kValidation, "audit list does not match cohort");
  }
  CohortReport report;
  report.summary = metrics::summarize_metrics(cohort.model_id(), cohort.dataset_id(), cohort.k(),
                                              audits, options.bootstrap);
  report.findings = metrics::per_finding_breakdown(audits, options.min_finding_n);
  try {
    report.detection = grounding::kl_detection(audits, options.population);
  } catch (const AuditError& e) {
    if (e.kind() != ErrorKind::kUndefined) throw;
  }
  report.grounding = grounding::grounding_checks(audits);
  return report;
}

CorrelationReport correlate(std::span<const CohortSummary> summaries) {
  if (summaries.size() < 2) {
    throw AuditError(ErrorKind::kUndefined, "correlation needs at least 2 cohorts");
  }
  std::vector<const CohortSummary*> ordered;
  for (const auto& s : summaries) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](const CohortSummary* a, const CohortSummary* b) {
    return std::tie(a->model_id, a->dataset_id) < std::tie(b->model_id, b->dataset_id);
  });
  CorrelationReport r;
  for (const CohortSummary* s : ordered) {
    r.points.points.push_back({s->flip_rate.value, s->dangerous_fraction.value});
    r.points.labels.push_back(s->label());
  }
  r.n_points = r.points.points.size();
  r.small_sample = r.n_points < 3;
  r.pearson_r = stats::pearson(r.points);
  r.spearman_rho = stats::spearman(r.points);
  return r;
}

ChecklistVerdict checklist(const CohortSummary& s, const ChecklistOptions& options) {
  ChecklistVerdict v;
  v.cohort = s.label();
  v.options = options;
  v.dangerous_fraction = s.dangerous_fraction.value;

  auto step = [&](std::string name, bool ok, std::string detail) {
    v.steps.push_back({std::move(name), ok ? StepStatus::kDone : StepStatus::kFlagged,
                       std::move(detail)});
  };

  step("Compute flip rates", s.flip_rate.denominator == s.n && s.n > 0,
       "flip rate " + format_percent(s.flip_rate.value) + "% over " + std::to_string(s.n) +
           " samples, K=" + std::to_string(s.k));
  step("Run a text-only baseline", s.n > 0,
       std::to_string(s.n) + " of " + std::to_string(s.n) + " samples carry a text-only pass");
  const std::size_t classified = std::accumulate(s.distribution.counts.begin(),
                                                 s.distribution.counts.end(), std::size_t{0});
  step("Classify samples into the four quadrants", classified == s.n,
       std::to_string(classified) + " of " + std::to_string(s.n) + " samples classified");
  const double fsum = std::accumulate(s.distribution.fractions.begin(),
                                      s.distribution.fractions.end(), 0.0);
  std::string dist;
  for (Quadrant q : kAllQuadrants) {
    if (!dist.empty()) dist += ", ";
    dist += std::string(to_string(q)) + " " + format_percent(s.distribution.fraction(q)) + "%";
  }
  step("Report the full quadrant distribution", std::abs(fsum - 1.0) < 1e-9, dist);
  const bool gate_flag = v.dangerous_fraction > options.gate;
  step("Gate on Dangerous fraction", !gate_flag,
       "Dangerous fraction " + format_percent(v.dangerous_fraction) + "% " +
           (gate_flag ? "exceeds" : "within") + " gate " + format_percent(options.gate) + "%");

  v.flagged = std::any_of(v.steps.begin(), v.steps.end(),
                          [](const ChecklistStep& st) { return st.status == StepStatus::kFlagged; });
  v.advisory_warning = v.dangerous_fraction > options.advisory;
  return v;
}

// ---------------------------------------------------------------------------

std::string format_percent(double fraction) {
  // Half-up at one decimal; the epsilon keeps decimal ties such as 0.6075
  // from falling below .5 in binary.
  const double tenths = std::floor(fraction * 1000.0 + 0.5 + 1e-9);
  return fixed(tenths / 10.0, 1);
}

std::string format_percent(const std::optional<double>& fraction) {
  return fraction ? format_percent(*fraction) : std::string("--");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string table1_markdown(std::span<const CohortSummary> summaries) {
  std::string out = md_row({"Model", "Dataset", "n", "Ideal", "Frag.", "Dang.", "Worst",
                            "Ideal %", "Frag. %", "Dang. %", "Worst %"});
  out += md_rule(11, 2);
  for (const auto& s : summaries) out += md_row(table1_cells(s, true));
  return out;
}

std::string table1_csv(std::span<const CohortSummary> summaries) {
  std::string out = csv_row({"model_id", "dataset_id", "n", "ideal_count", "fragile_count",
                             "dangerous_count", "worst_count", "ideal_pct", "fragile_pct",
                             "dangerous_pct", "worst_pct"});
  for (const auto& s : summaries) out += csv_row(table1_cells(s, false));
  return out;
}

std::string table2_markdown(std::span<const CohortSummary> summaries) {
  std::string out = md_row({"Model", "Dataset", "Ideal", "Fragile", "Dangerous", "Worst", "Overall"});
  out += md_rule(7, 2);
  for (const auto& s : summaries) {
    auto cells = table2_cells(s);
    const auto& dang = s.accuracy.accuracy[index_of(Quadrant::kDangerous)];
    if (dang && *dang > 0.8) cells[4] = "**" + cells[4] + "**";
    out += md_row(cells);
  }
  return out;
}

std::string table2_csv(std::span<const CohortSummary> summaries) {
  std::string out = csv_row({"model_id", "dataset_id", "ideal_acc_pct", "fragile_acc_pct",
                             "dangerous_acc_pct", "worst_acc_pct", "overall_acc_pct"});
  for (const auto& s : summaries) out += csv_row(table2_cells(s));
  return out;
}

std::string summary_markdown(const CohortReport& report) {
  const CohortSummary& s = report.summary;
  std::ostringstream out;
  out << "# Audit summary: " << s.label() << "\n\n";
  out << "Samples: " << s.n << ", paraphrases per sample: " << s.k << "\n\n";
  out << "## Quadrant distribution\n\n";
  out << table1_markdown(std::span(&s, 1)) << "\n";
  out << "- Flip rate: " << ci_text(s.flip_rate) << "\n";
  out << "- Dangerous fraction: " << ci_text(s.dangerous_fraction) << "\n\n";

  out << "## Accuracy by quadrant\n\n";
  out << md_row({"Quadrant", "n", "Correct", "Accuracy %"}) << md_rule(4, 1);
  for (Quadrant q : kAllQuadrants) {
    const std::size_t i = index_of(q);
    out << md_row({std::string(to_string(q)), std::to_string(s.accuracy.total[i]),
                   std::to_string(s.accuracy.correct[i]), format_percent(s.accuracy.accuracy[i])});
  }
  out << md_row({"Overall", std::to_string(s.n), "", format_percent(s.accuracy.overall)}) << "\n";

  out << "## Dangerous rate by ground truth\n\n";
  out << md_row({"Ground truth", "n", "Dangerous", "Dangerous %"}) << md_rule(4, 1);
  for (Verdict v : {Verdict::kYes, Verdict::kNo}) {
    const auto i = static_cast<std::size_t>(v);
    out << md_row({std::string(to_string(v)), std::to_string(s.gt_conditioned.total[i]),
                   std::to_string(s.gt_conditioned.dangerous[i]),
                   format_percent(s.gt_conditioned.fraction[i])});
  }
  out << "\n## Predictive entropy by quadrant (nats)\n\n";
  out << md_row({"Quadrant", "n", "Mean", "SD", "Q1", "Median", "Q3"}) << md_rule(7, 1);
  for (Quadrant q : kAllQuadrants) {
    const auto& d = s.entropy[index_of(q)];
    if (!d) {
      out << md_row({std::string(to_string(q)), "0", "--", "--", "--", "--", "--"});
      continue;
    }
    out << md_row({std::string(to_string(q)), std::to_string(d->count), fixed(d->mean, 4),
                   fixed(d->sd, 4, "--"), fixed(d->q1, 4), fixed(d->median, 4), fixed(d->q3, 4)});
  }

  out << "\n## Findings by Dangerous fraction\n\n";
  if (report.findings.empty()) {
    out << "No finding reaches the minimum group size.\n";
  } else {
    out << md_row({"Finding", "n", "Dangerous", "Dangerous %"}) << md_rule(4, 1);
    for (const auto& f : report.findings) {
      out << md_row({f.finding, std::to_string(f.n), std::to_string(f.dangerous),
                     format_percent(f.dangerous_fraction)});
    }
  }

  out << "\n## Grounding checks\n\n";
  if (report.detection) {
    out << detection_markdown(*report.detection, s.label());
  } else {
    out << "KL detection: not computable (needs probabilities and both classes).\n";
  }
  const auto& g = report.grounding;
  out << "\n";
  if (g.has_swaps || g.has_null) {
    out << md_row({"Quadrant", "Swap-invariant %", "Per-swap agreement %", "Null agreement %"})
        << md_rule(4, 1);
    for (Quadrant q : kAllQuadrants) {
      const std::size_t i = index_of(q);
      out << md_row({std::string(to_string(q)), format_percent(g.invariant_rate[i]),
                     format_percent(g.per_swap_agreement[i]),
                     format_percent(g.null_agreement_rate[i])});
    }
    out << "\n";
  }
  out << "Swap passes: " << (g.has_swaps ? "present" : "none") << " (coverage "
      << format_percent(g.swap_coverage) << "%)\n";
  out << "Null-image passes: " << (g.has_null ? "present" : "none") << " (coverage "
      << format_percent(g.null_coverage) << "%)\n";
  return out.str();
}

std::string detection_markdown(const grounding::DetectionReport& d, const std::string& cohort) {
  std::ostringstream out;
  out << "### KL detection of Dangerous samples: " << cohort << "\n\n";
  out << "Population: " << to_string(d.population) << "; scored samples: " << d.scored
      << "; clamped: " << d.clamped_count << "\n\n";
  out << "- AUROC Dangerous vs rest: " << fixed(d.auroc_dangerous_vs_rest, 4, "--") << "\n";
  out << "- AUROC Dangerous vs Ideal: " << fixed(d.auroc_dangerous_vs_ideal, 4, "--") << "\n\n";
  out << md_row({"Quadrant", "n", "Mean KL", "SD KL"}) << md_rule(4, 1);
  for (Quadrant q : kAllQuadrants) {
    const auto& m = d.mean_kl_by_quadrant[index_of(q)];
    if (!m) {
      out << md_row({std::string(to_string(q)), "0", "--", "--"});
    } else {
      out << md_row({std::string(to_string(q)), std::to_string(m->count), fixed(m->mean, 4),
                     fixed(m->sd, 4, "--")});
    }
  }
  return out.str();
}

std::string checklist_markdown(const ChecklistVerdict& v) {
  std::ostringstream out;
  out << "# Deployment checklist: " << v.cohort << "\n\n";
  out << md_row({"Step", "Check", "Status", "Detail"}) << md_rule(4, 4);
  for (std::size_t i = 0; i < v.steps.size(); ++i) {
    const auto& st = v.steps[i];
    out << md_row({std::to_string(i + 1), st.name,
                   st.status == StepStatus::kDone ? "done" : "FLAGGED", st.detail});
  }
  out << "\nOverall: " << (v.flagged ? "FLAGGED" : "PASS") << "\n";
  if (v.advisory_warning) {
    out << "\nWarning: Dangerous fraction " << format_percent(v.dangerous_fraction)
        << "% exceeds the " << format_percent(v.options.advisory) << "% advisory level.\n";
  }
  return out.str();
}

std::string correlation_markdown(const CorrelationReport& r) {
  std::ostringstream out;
  out << "# Flip rate vs. Dangerous fraction\n\n";
  out << md_row({"Cohort", "Flip rate %", "Dangerous %"}) << md_rule(3, 1);
  for (std::size_t i = 0; i < r.n_points; ++i) {
    out << md_row({r.points.labels[i], format_percent(r.points.points[i].x),
                   format_percent(r.points.points[i].y)});
  }
  out << "\n- Cohorts: " << r.n_points << "\n";
  out << "- Pearson r: " << fixed(r.pearson_r, 4) << "\n";
  out << "- Spearman rho: " << fixed(r.spearman_rho, 4) << "\n";
  if (r.small_sample) out << "\nWarning: n too small for inference.\n";
  return out.str();
}

// ---------------------------------------------------------------------------

ordered_json to_json(const CohortSummary& s) {
  ordered_json j;
  j["model_id"] = s.model_id;
  j["dataset_id"] = s.dataset_id;
  j["n"] = s.n;
  j["k"] = s.k;
  j["distribution"] = {
      {"counts", quadrant_object(s.distribution.counts, [](std::size_t c) { return ordered_json(c); })},
      {"fractions",
       quadrant_object(s.distribution.fractions, [](double f) { return ordered_json(f); })}};
  j["flip_rate"] = rate_json(s.flip_rate);
  j["dangerous_fraction"] = rate_json(s.dangerous_fraction);
  ordered_json acc = ordered_json::object();
  for (Quadrant q : kAllQuadrants) {
    const std::size_t i = index_of(q);
    acc[std::string(to_string(q))] = {{"correct", s.accuracy.correct[i]},
                                      {"total", s.accuracy.total[i]},
                                      {"accuracy", optional_json(s.accuracy.accuracy[i])}};
  }
  j["accuracy"] = {{"by_quadrant", acc}, {"overall", s.accuracy.overall}};
  ordered_json gt = ordered_json::object();
  for (Verdict v : {Verdict::kNo, Verdict::kYes}) {
    const auto i = static_cast<std::size_t>(v);
    gt[std::string(to_string(v))] = {{"total", s.gt_conditioned.total[i]},
                                     {"dangerous", s.gt_conditioned.dangerous[i]},
                                     {"fraction", optional_json(s.gt_conditioned.fraction[i])}};
  }
  j["gt_conditioned_dangerous"] = gt;
  j["entropy"] = quadrant_object(s.entropy, describe_json);
  return j;
}

ordered_json to_json(const grounding::DetectionReport& d) {
  ordered_json j;
  j["population"] = to_string(d.population);
  j["scored"] = d.scored;
  j["clamped_count"] = d.clamped_count;
  j["auroc_dangerous_vs_rest"] = optional_json(d.auroc_dangerous_vs_rest);
  j["auroc_dangerous_vs_ideal"] = optional_json(d.auroc_dangerous_vs_ideal);
  j["mean_kl_by_quadrant"] =
      quadrant_object(d.mean_kl_by_quadrant, [](const std::optional<grounding::MeanSd>& m) {
        if (!m) return ordered_json(nullptr);
        return ordered_json{{"count", m->count}, {"mean", m->mean}, {"sd", optional_json(m->sd)}};
      });
  return j;
}

ordered_json to_json(const CohortReport& r) {
  ordered_json j;
  j["format"] = kReportFormat;
  j["version"] = kReportVersion;
  j["summary"] = to_json(r.summary);
  j["findings"] = ordered_json::array();
  for (const auto& f : r.findings) {
    j["findings"].push_back({{"finding", f.finding},
                             {"n", f.n},
                             {"dangerous", f.dangerous},
                             {"dangerous_fraction", f.dangerous_fraction}});
  }
  j["detection"] = r.detection ? to_json(*r.detection) : ordered_json(nullptr);
  j["grounding"] = swap_json(r.grounding);
  return j;
}

ordered_json to_json(const CorrelationReport& r) {
  ordered_json j;
  j["n_points"] = r.n_points;
  j["pearson_r"] = r.pearson_r;
  j["spearman_rho"] = r.spearman_rho;
  j["small_sample"] = r.small_sample;
  j["points"] = ordered_json::array();
  for (std::size_t i = 0; i < r.n_points; ++i) {
    j["points"].push_back({{"label", r.points.labels[i]},
                           {"flip_rate", r.points.points[i].x},
                           {"dangerous_fraction", r.points.points[i].y}});
  }
  return j;
}

ordered_json to_json(const ChecklistVerdict& v) {
  ordered_json j;
  j["cohort"] = v.cohort;
  j["overall"] = v.flagged ? "flagged" : "pass";
  j["gate"] = v.options.gate;
  j["advisory"] = v.options.advisory;
  j["advisory_warning"] = v.advisory_warning;
  j["dangerous_fraction"] = v.dangerous_fraction;
  j["steps"] = ordered_json::array();
  for (const auto& st : v.steps) {
    j["steps"].push_back({{"name", st.name},
                          {"status", st.status == StepStatus::kDone ? "done" : "flagged"},
                          {"detail", st.detail}});
  }
  return j;
}

CohortSummary summary_from_json(const json& j) {
  return guarded([&] {
    CohortSummary s;
    s.model_id = j.at("model_id").get<std::string>();
    s.dataset_id = j.at("dataset_id").get<std::string>();
    s.n = j.at("n").get<std::size_t>();
    s.k = j.at("k").get<std::size_t>();
    s.distribution.n = s.n;
    s.distribution.counts = read_quadrant_object<std::size_t>(
        j.at("distribution").at("counts"), [](const json& v) { return v.get<std::size_t>(); });
    s.distribution.fractions = read_quadrant_object<double>(
        j.at("distribution").at("fractions"), [](const json& v) { return v.get<double>(); });
    s.flip_rate = read_rate(j.at("flip_rate"));
    s.dangerous_fraction = read_rate(j.at("dangerous_fraction"));
    const json& acc = j.at("accuracy");
    for (Quadrant q : kAllQuadrants) {
      const json& cell = acc.at("by_quadrant").at(std::string(to_string(q)));
      const std::size_t i = index_of(q);
      s.accuracy.correct[i] = cell.at("correct").get<std::size_t>();
      s.accuracy.total[i] = cell.at("total").get<std::size_t>();
      s.accuracy.accuracy[i] = read_optional(cell.at("accuracy"));
    }
    s.accuracy.overall = acc.at("overall").get<double>();
    for (Verdict v : {Verdict::kNo, Verdict::kYes}) {
      const json& cell = j.at("gt_conditioned_dangerous").at(std::string(to_string(v)));
      const auto i = static_cast<std::size_t>(v);
      s.gt_conditioned.total[i] = cell.at("total").get<std::size_t>();
      s.gt_conditioned.dangerous[i] = cell.at("dangerous").get<std::size_t>();
      s.gt_conditioned.fraction[i] = read_optional(cell.at("fraction"));
    }
    s.entropy = read_quadrant_object<std::optional<stats::Describe>>(j.at("entropy"), read_describe);
    return s;
  });
}

CohortReport report_from_json(const json& j) {
  return guarded([&] {
    if (j.at("format").get<std::string>() != kReportFormat ||
        j.at("version").get<int>() != kReportVersion) {
      throw AuditError(ErrorKind::kInput, "not a version-1 summary document");
    }
    CohortReport r;
    r.summary = summary_from_json(j.at("summary"));
    for (const json& f : j.at("findings")) {
      r.findings.push_back({f.at("finding").get<std::string>(), f.at("n").get<std::size_t>(),
                            f.at("dangerous").get<std::size_t>(),
                            f.at("dangerous_fraction").get<double>()});
    }
    if (!j.at("detection").is_null()) r.detection = read_detection(j.at("detection"));
    r.grounding = read_swap(j.at("grounding"));
    return r;
  });
}

CohortReport read_report_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AuditError(ErrorKind::kIo, "cannot open " + path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw AuditError(ErrorKind::kInput, "malformed JSON in " + path);
  return report_from_json(j);
}

// ---------------------------------------------------------------------------

std::string fig_stackedbar_csv(std::span<const CohortSummary> summaries) {
  std::string out = csv_row({"cohort", "model_id", "dataset_id", "n", "ideal", "fragile",
                             "dangerous", "worst"});
  for (const auto& s : summaries) {
    std::vector<std::string> row = {s.label(), s.model_id, s.dataset_id, std::to_string(s.n)};
    for (Quadrant q : kAllQuadrants) row.push_back(fixed(s.distribution.fraction(q), 6));
    out += csv_row(row);
  }
  return out;
}

std::string fig_scatter_csv(std::span<const CohortSummary> summaries) {
  std::string out = csv_row({"cohort", "model_id", "dataset_id", "flip_rate", "flip_rate_low",
                             "flip_rate_high", "dangerous_fraction", "dangerous_fraction_low",
                             "dangerous_fraction_high", "marker"});
  for (const auto& s : summaries) {
    out += csv_row({s.label(), s.model_id, s.dataset_id, fixed(s.flip_rate.value, 6),
                    fixed(s.flip_rate.ci.low, 6), fixed(s.flip_rate.ci.high, 6),
                    fixed(s.dangerous_fraction.value, 6), fixed(s.dangerous_fraction.ci.low, 6),
                    fixed(s.dangerous_fraction.ci.high, 6), s.dataset_id});
  }
  return out;
}

std::string fig_accuracy_csv(std::span<const CohortSummary> summaries) {
  std::string out =
      csv_row({"cohort", "model_id", "dataset_id", "quadrant", "n", "correct", "accuracy"});
  for (const auto& s : summaries) {
    for (Quadrant q : kAllQuadrants) {
      const std::size_t i = index_of(q);
      out += csv_row({s.label(), s.model_id, s.dataset_id, std::string(to_string(q)),
                      std::to_string(s.accuracy.total[i]), std::to_string(s.accuracy.correct[i]),
                      fixed(s.accuracy.accuracy[i], 6)});
    }
  }
  return out;
}

std::string fig_entropy_csv(std::span<const CohortSummary> summaries) {
  std::string out = csv_row({"cohort", "model_id", "dataset_id", "quadrant", "count", "mean",
                             "sd", "min", "q1", "median", "q3", "max"});
  for (const auto& s : summaries) {
    for (Quadrant q : kAllQuadrants) {
      const auto& d = s.entropy[index_of(q)];
      std::vector<std::string> row = {s.label(), s.model_id, s.dataset_id,
                                      std::string(to_string(q))};
      if (d) {
        for (auto v : {std::to_string(d->count), fixed(d->mean, 6), fixed(d->sd, 6),
                       fixed(d->min, 6), fixed(d->q1, 6), fixed(d->median, 6), fixed(d->q3, 6),
                       fixed(d->max, 6)}) {
          row.push_back(v);
        }
      } else {
        row.push_back("0");
        row.insert(row.end(), 7, "");
      }
      out += csv_row(row);
    }
  }
  return out;
}

std::vector<OutputFile> plot_data(std::span<const CohortSummary> summaries) {
  return {{"fig_stackedbar.csv", fig_stackedbar_csv(summaries)},
          {"fig_scatter.csv", fig_scatter_csv(summaries)},
          {"fig_accuracy.csv", fig_accuracy_csv(summaries)},
          {"fig_entropy.csv", fig_entropy_csv(summaries)}};
}

std::vector<OutputFile> render_tables(std::span<const CohortSummary> summaries,
                                      std::span<const Format> formats) {
  std::vector<OutputFile> files;
  if (has_format(formats, Format::kMarkdown)) {
    files.push_back({"table1.md", table1_markdown(summaries)});
    files.push_back({"table2.md", table2_markdown(summaries)});
  }
  if (has_format(formats, Format::kCsv)) {
    files.push_back({"table1.csv", table1_csv(summaries)});
    files.push_back({"table2.csv", table2_csv(summaries)});
    for (auto& f : plot_data(summaries)) files.push_back(std::move(f));
  }
  return files;
}

std::vector<OutputFile> render(const CohortReport& report, std::span<const Format> formats) {
  std::vector<OutputFile> files;
  if (has_format(formats, Format::kMarkdown)) {
    files.push_back({"summary.md", summary_markdown(report)});
  }
  if (has_format(formats, Format::kJson)) {
    files.push_back({"summary.json", to_json(report).dump(2) + "\n"});
  }
  if (has_format(formats, Format::kCsv)) {
    std::span<const CohortSummary> one(&report.summary, 1);
    files.push_back({"table1.csv", table1_csv(one)});
    files.push_back({"table2.csv", table2_csv(one)});
    for (auto& f : plot_data(one)) files.push_back(std::move(f));
  }
  return files;
}

std::vector<OutputFile> render(const CorrelationReport& report, std::span<const Format> formats) {
  std::vector<OutputFile> files;
  if (has_format(formats, Format::kMarkdown)) {
    files.push_back({"correlation.md", correlation_markdown(report)});
  }
  if (has_format(formats, Format::kJson)) {
    files.push_back({"correlation.json", to_json(report).dump(2) + "\n"});
  }
  return files;
}

std::vector<OutputFile> render(const ChecklistVerdict& verdict, std::span<const Format> formats) {
  std::vector<OutputFile> files;
  if (has_format(formats, Format::kMarkdown)) {
    files.push_back({"checklist.md", checklist_markdown(verdict)});
  }
  if (has_format(formats, Format::kJson)) {
    files.push_back({"checklist.json", to_json(verdict).dump(2) + "\n"});
  }
  return files;
}

void write_outputs(const std::string& directory, std::span<const OutputFile> files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw AuditError(ErrorKind::kIo, "cannot create " + directory + ": " + ec.message());
  for (const auto& f : files) {
    const fs::path path = fs::path(directory) / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << f.content;
    out.close();
    if (!out) throw AuditError(ErrorKind::kIo, "cannot write " + path.string());
  }
}

}  // namespace quadaudit::report
