#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kpzlab/constrained.hpp"
#include "kpzlab/scaled.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

/// Height pairs (l1, l2) of a zigzag with (l2 - l1) / n in (2^{-k-1}, 2^{-k}].
std::vector<std::pair<int, int>> dyadic_pairs(const Zigzag& z, int k);

/// sup |v - u| / (h^{2/3} (log(1 + 1/h))^{1/3}) over departure pairs (u, h1), (v, h2)
/// of every path with h = h2 - h1 in (2^{-k-1}, 2^{-k}]. Throws when no pair qualifies.
double modcon_geometry_stat(std::span<const PolymerPath> paths, int k);

/// sup |Wgt_n[(u, h1) -> (v, h2)]| / (h^{1/3} (log(1/h))^{2/3}) over subpaths between
/// departure points of the given polymers; needs k >= 1.
double modcon_weight_stat(const NoiseField& field, std::span<const PolymerPath> paths, int k);

/// Weight of the polymer's own subpath between its departures from levels l1 < l2.
double subpath_weight(const NoiseField& field, const PolymerPath& p, int l1, int l2);

struct DeviationStat {
  double a = 0.0;
  double r = 0.0;
  double threshold = 0.0;  ///< r (a s12)^{2/3} (log 1/a)^{1/3}
  std::vector<double> sup_fluc;  ///< per path
  ProportionCounter exceed;
  double p = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Per path, the sup of Fluc over heights whose lifetime fraction lies in
/// [a, 2a] or [1 - 2a, 1 - a], and the frequency with which it exceeds the threshold.
DeviationStat deviation_stat(std::span<const PolymerPath> paths, double a, double r);

struct CliffCensus {
  int A = 0;
  int m = 0;
  std::vector<double> X;
  std::vector<long long> Z;
  std::vector<long long> Psi;
  std::vector<int> I;
  double fraction = 0.0;  ///< |I| / m
};

/// Census of strips of height A along a geodesic from (0,0) to (n,n).
CliffCensus cliff_census(const Staircase& geodesic, int A);

struct Steadiness {
  std::vector<double> omega;
  std::size_t count_at_least = 0;  ///< number of omega_i >= beta1 n^{-2/3}
  double residual = 0.0;           ///< |sum omega - n^{1/3} / 2|
  double unscaled_residual = 0.0;  ///< |sum W_i - n|
};

/// Scaled horizontal advances of the polymer for (0,0) -> (0,1).
Steadiness steadiness(const PolymerPath& p, double beta1);

struct RegularityResult {
  bool holds = true;
  double worst_ratio = 0.0;
};

/// Worst |v - u| / h^{2/3} over departure pairs at distinct heights, compared with R.
RegularityResult regularity_check(const Zigzag& z, double R);

/// The staircase (0, 0) -> (n, n) with jumps z_k = k - 1; its departures are all 0.
Zigzag straight_reference(int n);

struct SlenderConfig {
  int n = 64;
  int ell = 2;
  double chi = 0.25;
  double d0 = 0.5;
  std::vector<double> thetas{0.5, 0.25, 0.125};
  /// Endpoint offsets from the reference, in units of s12^{2/3}.
  std::vector<double> offsets{-0.12, -0.085714285714285715, -0.051428571428571428, -0.017142857142857144,
                              0.017142857142857144, 0.051428571428571428, 0.085714285714285715, 0.12};
};

struct SlenderReplica {
  bool regular = true;
  /// sup of s12^{-1/3} Wgt* per theta (same order as config.thetas); nullopt when
  /// no endpoint pair admits a close zigzag.
  std::vector<std::optional<double>> sup;
  double unconstrained_sup = 0.0;
  std::size_t endpoint_pairs = 0;
};

/// Slender shortfall statistics on one field. Heights run over s1 in 2^{-ell-1} Z
/// with s12 = 2^{-ell}; a reference failing theta^{-1/4}-regularity yields regular = false.
SlenderReplica slender_shortfall(const NoiseField& field, const Zigzag& reference, const SlenderConfig& config);

/// Whether ell satisfies the hypothesis 2^{ell} <= n theta^{40}.
bool slender_hypothesis_holds(int n, int ell, double theta) noexcept;

}  // namespace kpzlab
