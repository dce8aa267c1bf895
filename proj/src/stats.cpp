#include "kpzlab/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

namespace kpzlab {

double kolmogorov_survival(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 20 || b.size() < 20) throw DomainError("two-sample KS needs at least 20 samples per side");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double root = std::sqrt(ne);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("one-sample KS needs samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::pair<double, double> proportion_ci(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0 || successes > trials) throw DomainError("invalid binomial counts");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("variance needs at least two values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

MeanEstimate mean_estimate(std::span<const double> values, double level) {
  if (values.size() < 2) throw DomainError("mean estimate needs at least two values");
  MeanEstimate e;
  e.count = values.size();
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  e.sd = std::sqrt(sample_variance(values));
  e.se = e.sd / std::sqrt(static_cast<double>(values.size()));
  const double z = normal_quantile(0.5 + 0.5 * level);
  e.ci_lo = e.mean - z * e.se;
  e.ci_hi = e.mean + z * e.se;
  return e;
}

MedianEstimate median_estimate(std::span<const double> values, double level) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  MedianEstimate m;
  m.median = n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
  // Normal approximation to the binomial ranks bracketing the median.
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double half = 0.5 * z * std::sqrt(static_cast<double>(n));
  const auto lo = static_cast<long long>(std::floor(0.5 * static_cast<double>(n) - half));
  const auto hi = static_cast<long long>(std::ceil(0.5 * static_cast<double>(n) + half));
  m.ci_lo = x[static_cast<std::size_t>(std::clamp<long long>(lo, 0, static_cast<long long>(n) - 1))];
  m.ci_hi = x[static_cast<std::size_t>(std::clamp<long long>(hi, 0, static_cast<long long>(n) - 1))];
  return m;
}

ExponentFit exponent_fit(std::span<const double> scales, std::span<const double> values) {
  if (scales.size() != values.size()) throw DomainError("exponent fit needs matching scale and value lists");
  if (scales.size() < 3) throw DomainError("exponent fit needs at least three scales");
  ExponentFit fit;
  fit.scales.assign(scales.begin(), scales.end());
  fit.values.assign(values.begin(), values.end());
  const auto m = static_cast<double>(scales.size());
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !(values[i] > 0.0)) throw DomainError("exponent fit needs positive inputs");
    lx.push_back(std::log(scales[i]));
    ly.push_back(std::log(values[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("exponent fit needs distinct scales");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  fit.slope_se = m > 2.0 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return fit;
}

std::vector<double> ReplicaSamples::values() const {
  auto sorted = entries_;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size());
  for (const auto& e : sorted) out.push_back(e.second);
  return out;
}

}  // namespace kpzlab
