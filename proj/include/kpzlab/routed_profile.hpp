#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kpzlab/scaled.hpp"

namespace kpzlab {

/// x -> Z_n(x, a): the largest weight of zigzags (0,0) -> (0,1) whose departure
/// from height a is at x, sampled on grid abscissae.
struct RoutedProfile {
  int n = 0;
  double a = 0.0;
  std::vector<double> x_grid;
  std::vector<Index> grid_index;  ///< unscaled field index of each abscissa
  std::vector<double> z_values;
  std::vector<double> forward;   ///< Wgt_n[(0,0) -> (x, a)]
  std::vector<double> backward;  ///< Wgt_n[(x^-, a_+) -> (0,1)]
  std::size_t argmax = 0;        ///< leftmost maximizer position
  double argmax_x = 0.0;
  double max_value = 0.0;

  /// Z at the largest sampled abscissa not exceeding x.
  [[nodiscard]] double z_at(double x) const;
  [[nodiscard]] std::size_t position_at(double x) const;
};

/// Weight carried by the unit vertical step between heights a and a + 1/n:
/// forward(x) + backward(x) - Z_n(x, a) = 2^{-1/2} n^{-1/3}.
double unit_step_weight(int n) noexcept;

/// Routed profile on [x_lo, x_hi]. Forward and backward addends come from one
/// sweep each, the backward one on the reflected field. x_step = 0 samples every
/// field grid point; otherwise abscissae x_lo + m x_step are snapped down.
/// The field must span levels 0..n and unscaled x in [0, n].
RoutedProfile routed_profile(const NoiseField& field, int n, double a, double x_lo, double x_hi, double x_step = 0.0);

/// Routed profile over every departure admissible for the route (0,0) -> (0,1).
RoutedProfile routed_profile(const NoiseField& field, int n, double a);

struct DecompositionOptions {
  /// Exponent of the prefactor a^{p} on the forward normalized profile; any value
  /// other than 1/3 yields a deliberately mis-scaled evaluation.
  double forward_prefactor_exponent = 1.0 / 3.0;
};

/// Recomputes Z through the normalized profiles
///   a^{1/3} NrL_up(a^{-2/3} x) + (1 - a_+)^{1/3} NrL_down((1 - a_+)^{-2/3} x^-),
/// each evaluated by the scaling principle on fresh sweeps of the same field,
/// and returns max |recomputed - Z| / (1 + |Z|).
double normalized_decomposition_check(const NoiseField& field, const RoutedProfile& profile,
                                      const DecompositionOptions& options = {});

struct TwinPeakParams {
  double R = 0.0;
  double ell = 1.0;
  double ell_prime = 1.0;
  double eps = 0.1;
};

/// Smallest sigma for which the twin-peak event holds on this profile:
/// min over |x - M| in [eps, ell'/3] of (Z(M) - Z(x)) / |x - M|^{1/2}.
/// nullopt when M lies outside [R - ell/3, R + ell/3]; +inf when no abscissa
/// lies in the annulus.
std::optional<double> twin_peak_threshold(const RoutedProfile& profile, const TwinPeakParams& params);

struct ProportionEstimate {
  double parameter = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Per-sigma frequency of the twin-peak event with Wilson 95% intervals.
std::vector<ProportionEstimate> twin_peak_estimate(std::span<const RoutedProfile> ensemble,
                                                   const TwinPeakParams& params, std::span<const double> sigmas);
/// Same estimate from precomputed per-profile thresholds.
std::vector<ProportionEstimate> twin_peak_estimate(std::span<const std::optional<double>> thresholds,
                                                   std::span<const double> sigmas);

/// Linear drift removed from Z before comparing increments with rate-two
/// Brownian motion: 2^{1/2} (a (1-a))^{-1} R + eps(a, R, n).
double brownianity_drift(int n, double a, double R) noexcept;

/// Drift-adjusted increment X(R + delta/2) - X(R - delta/2), X(x) = Z(x) + drift x.
double brownianity_increment(const RoutedProfile& profile, double R, double delta);

struct BrownianityStats {
  std::size_t samples = 0;
  double drift = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double ks_distance = 0.0;
  double ks_p_value = 0.0;
};

/// One increment per replica; variance and KS distance against N(0, 2 delta).
/// Refuses fewer than 100 increments.
BrownianityStats brownianity_stats(std::span<const double> increments, int n, double a, double R, double delta);
BrownianityStats brownianity_stats(std::span<const RoutedProfile> ensemble, double a, double R, double delta);

}  // namespace kpzlab
