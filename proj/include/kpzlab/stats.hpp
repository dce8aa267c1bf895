#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpzlab/error.hpp"

namespace kpzlab {

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;  ///< asymptotic Kolmogorov approximation
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda) noexcept;

/// Classical two-sample Kolmogorov-Smirnov statistic. Requires at least 20
/// samples on each side. The p-value uses the effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample statistic against a continuous CDF.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

double normal_cdf(double x) noexcept;
double normal_quantile(double p);

/// Wilson score interval for a binomial proportion at the given two-sided level.
std::pair<double, double> proportion_ci(std::size_t successes, std::size_t trials, double level = 0.95);

struct MeanEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Sample mean with a normal-approximation two-sided interval.
MeanEstimate mean_estimate(std::span<const double> values, double level = 0.95);

double sample_variance(std::span<const double> values);

struct MedianEstimate {
  double median = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Sample median with a distribution-free order-statistic interval.
MedianEstimate median_estimate(std::span<const double> values, double level = 0.95);

/// Least-squares line through (log scale, log value).
struct ExponentFit {
  std::vector<double> scales;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double residual = 0.0;  ///< root mean square residual on the log scale
};

ExponentFit exponent_fit(std::span<const double> scales, std::span<const double> values);

/// Per-replica samples keyed by replica index. Merging is a multiset union and
/// values() is ordered by replica, so reductions do not depend on the order in
/// which partial accumulators were combined.
class ReplicaSamples {
 public:
  void add(std::uint64_t replica, double value) { entries_.emplace_back(replica, value); }
  void merge(const ReplicaSamples& other) { entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end()); }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] std::vector<double> values() const;

 private:
  std::vector<std::pair<std::uint64_t, double>> entries_;
};

/// Counts of an indicator; integer merge is exact.
struct ProportionCounter {
  std::size_t successes = 0;
  std::size_t trials = 0;

  void add(bool hit) noexcept {
    successes += hit ? 1 : 0;
    ++trials;
  }
  void merge(const ProportionCounter& other) noexcept {
    successes += other.successes;
    trials += other.trials;
  }
};

}  // namespace kpzlab
