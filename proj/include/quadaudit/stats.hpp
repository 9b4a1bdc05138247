#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadaudit/kernels.hpp"

namespace quadaudit::stats {

/// -p ln p - (1-p) ln(1-p) in nats, with 0 ln 0 = 0.
double binary_entropy(double p_yes);

struct KlValue {
  double nats = 0.0;
  bool clamped = false;  // an input was pulled into [eps, 1-eps]
};

/// Forward KL(p || q) between Bernoulli distributions, in nats.
KlValue binary_kl_detail(double p, double q, double eps = kernels::kKlEpsilon);
inline double binary_kl(double p, double q, double eps = kernels::kKlEpsilon) {
  return binary_kl_detail(p, q, eps).nats;
}

/// KL(p||q) + KL(q||p).
KlValue symmetric_kl_detail(double p, double q, double eps = kernels::kKlEpsilon);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

struct BootstrapOptions {
  std::size_t resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 42;
};

/// Means of `resamples` with-replacement resamples of `values`. Resample b
/// draws from its own counter stream keyed by (seed, b).
std::vector<double> bootstrap_means(std::span<const double> values, std::size_t resamples,
                                    std::uint64_t seed);

/// Nearest-rank percentile interval over a statistic sample (any order).
/// Lower bound: rank ceil(alpha*B); upper: rank ceil((1-alpha)*B), 1-based,
/// alpha = (1-level)/2.
std::pair<double, double> percentile_interval(std::vector<double> statistics, double level);

/// Percentile bootstrap CI of the mean. Throws on empty input, B == 0, or
/// level outside (0,1).
ConfidenceInterval bootstrap_ci(std::span<const double> values,
                                const BootstrapOptions& options = {});

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PointSet {
  std::vector<Point> points;
  std::vector<std::string> labels;  // empty or one per point
};

double pearson(const PointSet& set);
double spearman(const PointSet& set);

/// 1-based ranks; tied values share the mean of their rank block.
std::vector<double> average_ranks(std::span<const double> values);

/// P(score of random positive > score of random negative), ties count 1/2.
double auroc(std::span<const double> scores, std::span<const bool> positives);
double auroc(std::span<const double> scores, const std::vector<bool>& positives);

struct Describe {
  std::size_t count = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample sd; absent for count < 2
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Descriptive statistics; quartiles by linear interpolation between order
/// statistics (position (n-1)*p). Throws on empty input.
Describe describe(std::span<const double> values);

}  // namespace quadaudit::stats
