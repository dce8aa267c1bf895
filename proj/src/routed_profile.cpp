#include "kpzlab/routed_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kpzlab/stats.hpp"

namespace kpzlab {

namespace {

struct RouteExtent {
  Index first = 0;  ///< grid index of unscaled 0
  Index last = 0;   ///< grid index of unscaled n
};

RouteExtent route_extent(const NoiseField& field, int n) {
  if (field.level_count() < n + 1) throw DomainError("field has fewer than n + 1 levels");
  if (field.x_min() > 0.0 || field.x_max() < n - NoiseField::kSnapSlack * field.step()) {
    throw DomainError("field extent does not cover unscaled [0, n]");
  }
  return {field.grid_index(0.0), field.grid_index(static_cast<double>(n))};
}

int departure_level(int n, double a) {
  const double scaled = a * n;
  const auto level = std::llround(scaled);
  if (std::abs(scaled - static_cast<double>(level)) > 1e-9 * std::max(1.0, scaled)) {
    std::ostringstream msg;
    msg << "a = " << a << " is not a multiple of 1/" << n;
    throw DomainError(msg.str());
  }
  if (level <= 0 || level >= n) throw DomainError("a must lie strictly between 0 and 1");
  return static_cast<int>(level);
}

/// Energies M[(0,0) -> (u, level)] on [first, last].
std::vector<double> forward_energies(const NoiseField& field, const RouteExtent& e, int level) {
  return detail::sweep(field, e.first, e.last, 0, level);
}

/// Energies M[(u, level) -> (n, n)], indexed by original grid offset from e.first.
std::vector<double> backward_energies(const NoiseField& field, const RouteExtent& e, int n, int level) {
  const ReflectedField reflected(field, n, e.last);
  auto r = detail::sweep(reflected, 0, e.last - e.first, 0, n - level);
  std::reverse(r.begin(), r.end());
  return r;
}

}  // namespace

double unit_step_weight(int n) noexcept { return 1.0 / (std::numbers::sqrt2 * std::cbrt(static_cast<double>(n))); }

std::size_t RoutedProfile::position_at(double x) const {
  if (x_grid.empty()) throw DomainError("empty routed profile");
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  auto it = std::upper_bound(x_grid.begin(), x_grid.end(), x + tol);
  if (it == x_grid.begin()) throw DomainError("abscissa below the profile window");
  return static_cast<std::size_t>(std::distance(x_grid.begin(), it) - 1);
}

double RoutedProfile::z_at(double x) const { return z_values[position_at(x)]; }

RoutedProfile routed_profile(const NoiseField& field, int n, double a, double x_lo, double x_hi, double x_step) {
  if (n < 2) throw DomainError("routed profile needs n >= 2");
  const int level = departure_level(n, a);
  if (!(x_lo <= x_hi)) throw DomainError("routed profile window is empty");
  if (x_step < 0.0) throw DomainError("x_step must be nonnegative");
  const auto extent = route_extent(field, n);
  const double n23 = n_two_thirds(n);
  const double u_lo = level + 2.0 * n23 * x_lo;
  const double u_hi = level + 2.0 * n23 * x_hi;
  const double slack = NoiseField::kSnapSlack * field.step();
  if (u_lo < -slack || u_hi > n + slack) throw DomainError("routed profile window leaves the admissible range");

  std::vector<Index> indices;
  if (x_step == 0.0) {
    Index i = field.snap(std::max(u_lo, 0.0));
    if (field.x_at(i) < u_lo - slack) ++i;
    const Index top = field.snap(std::min(u_hi, static_cast<double>(n)));
    for (; i <= top; ++i) indices.push_back(i);
  } else {
    const auto count = static_cast<long long>(std::floor((x_hi - x_lo) / x_step + 1e-9));
    for (long long m = 0; m <= count; ++m) {
      const double u = std::clamp(level + 2.0 * n23 * (x_lo + static_cast<double>(m) * x_step), 0.0,
                                  static_cast<double>(n));
      const Index i = field.snap(u);
      if (indices.empty() || indices.back() != i) indices.push_back(i);
    }
  }
  if (indices.empty()) throw DomainError("routed profile window contains no grid point");

  const auto fwd = forward_energies(field, extent, level);
  const auto bwd = backward_energies(field, extent, n, level + 1);
  const UnscaledPoint origin{field.x_at(extent.first), 0};
  const UnscaledPoint target{field.x_at(extent.last), n};
  const double unit = unit_step_weight(n);

  RoutedProfile p;
  p.n = n;
  p.a = static_cast<double>(level) / n;
  p.grid_index = indices;
  p.x_grid.reserve(indices.size());
  p.forward.reserve(indices.size());
  p.backward.reserve(indices.size());
  p.z_values.reserve(indices.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Index i = indices[j];
    const double u = field.x_at(i);
    const auto off = static_cast<std::size_t>(i - extent.first);
    const double wf = weight_from_energy(n, fwd[off], origin, {u, level});
    const double wb = weight_from_energy(n, bwd[off], {u, level + 1}, target);
    p.x_grid.push_back((u - level) / (2.0 * n23));
    p.forward.push_back(wf);
    p.backward.push_back(wb);
    p.z_values.push_back(wf + wb - unit);
    if (p.z_values.back() > best) {
      best = p.z_values.back();
      p.argmax = j;
    }
  }
  p.argmax_x = p.x_grid[p.argmax];
  p.max_value = best;
  return p;
}

RoutedProfile routed_profile(const NoiseField& field, int n, double a) {
  const double n13 = std::cbrt(static_cast<double>(n));
  const int level = departure_level(n, a);
  const double as = static_cast<double>(level) / n;
  return routed_profile(field, n, as, -0.5 * n13 * as, 0.5 * n13 * (1.0 - as), 0.0);
}

double normalized_decomposition_check(const NoiseField& field, const RoutedProfile& profile,
                                      const DecompositionOptions& options) {
  const int n = profile.n;
  const int level = departure_level(n, profile.a);
  if (level + 1 >= n) throw DomainError("decomposition needs n a + 1 < n");
  const auto extent = route_extent(field, n);
  const double a = static_cast<double>(level) / n;
  const double a_plus = static_cast<double>(level + 1) / n;
  const double shift = 0.5 / n_two_thirds(n);

  // Forward profile as the n a model from (0,0) to (z, 1).
  const int n_up = level;
  const auto up = forward_energies(field, extent, n_up);
  // Backward profile as the N' model from (z, kappa) to (0, kappa + 1).
  const int n_down = n - level - 1;
  const CompatibleTriple down_triple(n_down, static_cast<double>(level + 1) / n_down, static_cast<double>(n) / n_down);
  const auto down = backward_energies(field, extent, n, down_triple.level1());
  const UnscaledPoint down_end{field.x_at(extent.last), down_triple.level2()};

  const double up_scale = std::pow(a, options.forward_prefactor_exponent);
  const double down_scale = std::cbrt(1.0 - a_plus);
  double worst = 0.0;
  for (std::size_t j = 0; j < profile.x_grid.size(); ++j) {
    const double x = profile.x_grid[j];

    const double z_up = std::pow(a, -2.0 / 3.0) * x;
    const Index iu = field.snap(unscale_point(n_up, {z_up, 1.0}).v1);
    const UnscaledPoint up_end{field.x_at(iu), n_up};
    const double nr_up = weight_from_energy(n_up, up[static_cast<std::size_t>(iu - extent.first)],
                                            {field.x_at(extent.first), 0}, up_end);

    const double z_down = std::pow(1.0 - a_plus, -2.0 / 3.0) * (x - shift);
    const Index id = field.snap(unscale_point(n_down, {z_down, down_triple.s1()}).v1);
    const UnscaledPoint down_start{field.x_at(id), down_triple.level1()};
    const double nr_down =
        weight_from_energy(n_down, down[static_cast<std::size_t>(id - extent.first)], down_start, down_end);

    const double recomputed = up_scale * nr_up + down_scale * nr_down - unit_step_weight(n);
    const double z = profile.z_values[j];
    worst = std::max(worst, std::abs(recomputed - z) / (1.0 + std::abs(z)));
  }
  return worst;
}

std::optional<double> twin_peak_threshold(const RoutedProfile& profile, const TwinPeakParams& params) {
  if (!(params.eps > 0.0 && 3.0 * params.eps < params.ell_prime && params.ell_prime <= params.ell)) {
    throw DomainError("twin peaks need 0 < 3 eps < ell' <= ell");
  }
  const double m = profile.argmax_x;
  if (std::abs(m - params.R) > params.ell / 3.0) return std::nullopt;
  const double zm = profile.max_value;
  double threshold = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < profile.x_grid.size(); ++j) {
    const double d = std::abs(profile.x_grid[j] - m);
    if (d < params.eps || d > params.ell_prime / 3.0) continue;
    threshold = std::min(threshold, (zm - profile.z_values[j]) / std::sqrt(d));
  }
  return threshold;
}

std::vector<ProportionEstimate> twin_peak_estimate(std::span<const std::optional<double>> thresholds,
                                                   std::span<const double> sigmas) {
  if (thresholds.empty()) throw DomainError("twin-peak estimate needs a nonempty ensemble");
  std::vector<ProportionEstimate> out;
  for (double sigma : sigmas) {
    ProportionCounter c;
    for (const auto& t : thresholds) c.add(t.has_value() && sigma >= *t);
    const auto [lo, hi] = proportion_ci(c.successes, c.trials);
    out.push_back({sigma, c.successes, c.trials, static_cast<double>(c.successes) / static_cast<double>(c.trials), lo,
                   hi});
  }
  return out;
}

std::vector<ProportionEstimate> twin_peak_estimate(std::span<const RoutedProfile> ensemble,
                                                   const TwinPeakParams& params, std::span<const double> sigmas) {
  std::vector<std::optional<double>> thresholds;
  thresholds.reserve(ensemble.size());
  for (const auto& p : ensemble) thresholds.push_back(twin_peak_threshold(p, params));
  return twin_peak_estimate(std::span<const std::optional<double>>(thresholds), sigmas);
}

double brownianity_drift(int n, double a, double R) noexcept {
  const double main = std::numbers::sqrt2 * R / (a * (1.0 - a));
  const double eps = std::numbers::sqrt2 * R / ((1.0 - a - 1.0 / n) * (1.0 - a) * n);
  return main + eps;
}

double brownianity_increment(const RoutedProfile& profile, double R, double delta) {
  if (!(delta > 0.0)) throw DomainError("increment length must be positive");
  const std::size_t lo = profile.position_at(R - 0.5 * delta);
  const std::size_t hi = profile.position_at(R + 0.5 * delta);
  const double drift = brownianity_drift(profile.n, profile.a, R);
  return profile.z_values[hi] - profile.z_values[lo] + drift * (profile.x_grid[hi] - profile.x_grid[lo]);
}

BrownianityStats brownianity_stats(std::span<const double> increments, int n, double a, double R, double delta) {
  if (increments.size() < 100) throw DomainError("Brownianity statistics need at least 100 increments");
  if (!(delta > 0.0)) throw DomainError("increment length must be positive");
  BrownianityStats s;
  s.samples = increments.size();
  s.drift = brownianity_drift(n, a, R);
  const auto m = mean_estimate(increments);
  s.mean = m.mean;
  s.variance = m.sd * m.sd;
  const double sd = std::sqrt(2.0 * delta);
  const auto ks = ks_one_sample(increments, [sd](double v) { return normal_cdf(v / sd); });
  s.ks_distance = ks.distance;
  s.ks_p_value = ks.p_value;
  return s;
}

BrownianityStats brownianity_stats(std::span<const RoutedProfile> ensemble, double a, double R, double delta) {
  if (ensemble.size() < 100) throw DomainError("Brownianity statistics need at least 100 replicas");
  std::vector<double> inc;
  inc.reserve(ensemble.size());
  for (const auto& p : ensemble) inc.push_back(brownianity_increment(p, R, delta));
  return brownianity_stats(inc, ensemble.front().n, a, R, delta);
}

}  // namespace kpzlab
