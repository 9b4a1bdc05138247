#include "quadaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "kernels/log_poly.hpp"
#include "quadaudit/error.hpp"
#include "quadaudit/seeding.hpp"

namespace quadaudit::stats {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw AuditError(ErrorKind::kInput, std::string(what) + " out of range [0,1]");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw AuditError(ErrorKind::kInput, "KL epsilon out of range");
}

// Rank for the nearest-rank rule, robust to alpha*B landing a hair above an
// integer (0.025 * 2000 evaluates to 50.00000000000004).
std::size_t nearest_rank(double fraction, std::size_t count) {
  const double r = fraction * static_cast<double>(count);
  const double nearest = std::round(r);
  double rank = std::abs(r - nearest) < 1e-9 ? nearest : std::ceil(r);
  rank = std::clamp(rank, 1.0, static_cast<double>(count));
  return static_cast<std::size_t>(rank);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

double binary_entropy(double p_yes) {
  require_probability(p_yes, "p_yes");
  return kernels::detail::entropy_scalar(p_yes);
}

KlValue binary_kl_detail(double p, double q, double eps) {
  require_probability(p, "p");
  require_probability(q, "q");
  require_eps(eps);
  KlValue v;
  v.nats = kernels::detail::kl_scalar(p, q, eps, v.clamped);
  return v;
}

KlValue symmetric_kl_detail(double p, double q, double eps) {
  const KlValue forward = binary_kl_detail(p, q, eps);
  const KlValue reverse = binary_kl_detail(q, p, eps);
  return {forward.nats + reverse.nats, forward.clamped || reverse.clamped};
}

std::vector<double> bootstrap_means(std::span<const double> values, std::size_t resamples,
                                    std::uint64_t seed) {
  if (values.empty()) throw AuditError(ErrorKind::kInput, "bootstrap over empty input");
  if (resamples == 0) throw AuditError(ErrorKind::kInput, "bootstrap needs at least one resample");
  if (values.size() > std::numeric_limits<std::int32_t>::max()) {
    throw AuditError(ErrorKind::kInput, "bootstrap input too large");
  }
  const std::size_t n = values.size();
  std::vector<std::uint32_t> index(n);
  std::vector<double> means(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    CounterRng rng(derive_seed(seed, "bootstrap", b));
    for (auto& i : index) i = static_cast<std::uint32_t>(rng.below(n));
    means[b] = kernels::gather_sum(values, index) / static_cast<double>(n);
  }
  return means;
}

std::pair<double, double> percentile_interval(std::vector<double> statistics, double level) {
  if (statistics.empty()) throw AuditError(ErrorKind::kInput, "percentile of empty sample");
  if (!(level > 0.0 && level < 1.0)) {
    throw AuditError(ErrorKind::kInput, "confidence level must lie in (0,1)");
  }
  std::sort(statistics.begin(), statistics.end());
  const double alpha = (1.0 - level) / 2.0;
  const std::size_t lo = nearest_rank(alpha, statistics.size());
  const std::size_t hi = nearest_rank(1.0 - alpha, statistics.size());
  return {statistics[lo - 1], statistics[hi - 1]};
}

ConfidenceInterval bootstrap_ci(std::span<const double> values, const BootstrapOptions& options) {
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw AuditError(ErrorKind::kInput, "confidence level must lie in (0,1)");
  }
  auto [low, high] =
      percentile_interval(bootstrap_means(values, options.resamples, options.seed), options.level);
  return {low, high, options.level, options.resamples, options.seed};
}

double pearson(const PointSet& set) {
  const auto& pts = set.points;
  if (pts.size() < 2) throw AuditError(ErrorKind::kUndefined, "correlation needs at least 2 points");
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const Point& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const Point& p : pts) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw AuditError(ErrorKind::kUndefined, "undefined correlation: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Ranks i+1..j share their mean.
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

double spearman(const PointSet& set) {
  if (set.points.size() < 2) {
    throw AuditError(ErrorKind::kUndefined, "correlation needs at least 2 points");
  }
  std::vector<double> xs, ys;
  xs.reserve(set.points.size());
  ys.reserve(set.points.size());
  for (const Point& p : set.points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  PointSet ranked;
  ranked.points.reserve(rx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) ranked.points.push_back({rx[i], ry[i]});
  return pearson(ranked);
}

double auroc(std::span<const double> scores, std::span<const bool> positives) {
  if (scores.size() != positives.size()) {
    throw AuditError(ErrorKind::kInput, "scores and labels differ in length");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw AuditError(ErrorKind::kInput, "NaN score");
  }
  std::size_t n_pos = 0;
  for (bool b : positives) n_pos += b ? 1 : 0;
  const std::size_t n_neg = positives.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw AuditError(ErrorKind::kUndefined, "AUROC needs both positive and negative samples");
  }
  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (positives[i]) rank_sum += ranks[i];
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double auroc(std::span<const double> scores, const std::vector<bool>& positives) {
  std::unique_ptr<bool[]> flags(new bool[positives.size()]);
  for (std::size_t i = 0; i < positives.size(); ++i) flags[i] = positives[i];
  return auroc(scores, std::span<const bool>(flags.get(), positives.size()));
}

Describe describe(std::span<const double> values) {
  if (values.empty()) throw AuditError(ErrorKind::kInput, "describe over empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Describe d;
  d.count = sorted.size();
  const double n = static_cast<double>(d.count);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  d.mean = sum / n;
  if (d.count >= 2) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - d.mean) * (v - d.mean);
    d.sd = std::sqrt(ss / (n - 1.0));
  }
  d.min = sorted.front();
  d.max = sorted.back();
  d.q1 = quantile_sorted(sorted, 0.25);
  d.median = quantile_sorted(sorted, 0.5);
  d.q3 = quantile_sorted(sorted, 0.75);
  return d;
}

}  // namespace quadaudit::stats
