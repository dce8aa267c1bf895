#pragma once

#include <cmath>
#include <vector>

#include "kpzlab/lpp.hpp"

namespace kpzlab {

/// (n, s1, s2) with n*s1, n*s2 integers and s1 < s2.
class CompatibleTriple {
 public:
  CompatibleTriple(int n, double s1, double s2);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double s1() const noexcept { return static_cast<double>(level1_) / n_; }
  [[nodiscard]] double s2() const noexcept { return static_cast<double>(level2_) / n_; }
  [[nodiscard]] double s12() const noexcept { return static_cast<double>(level2_ - level1_) / n_; }
  [[nodiscard]] int level1() const noexcept { return level1_; }
  [[nodiscard]] int level2() const noexcept { return level2_; }

 private:
  int n_;
  int level1_;
  int level2_;
};

/// Scaled coordinates (x, t) with n*t an integer.
struct ScaledPoint {
  double x = 0.0;
  double t = 0.0;
};

/// A point of the plane in unscaled coordinates (v1 horizontal, v2 vertical).
struct PlanarPoint {
  double v1 = 0.0;
  double v2 = 0.0;
};

/// R_n(v1, v2) = (2^{-1} n^{-2/3} (v1 - v2), v2 / n).
ScaledPoint scale_point(int n, PlanarPoint p) noexcept;
ScaledPoint scale_point(int n, UnscaledPoint p) noexcept;
/// Inverse of scale_point.
PlanarPoint unscale_point(int n, ScaledPoint p) noexcept;

/// tau_K(x, t) = (x + K t, t).
ScaledPoint shear_transform(double K, ScaledPoint p) noexcept;

/// n^{2/3}; cached formula used throughout the scaled model.
inline double n_two_thirds(int n) noexcept { return std::cbrt(static_cast<double>(n) * n); }

/// Scaled endpoints resolved to grid points of a field.
struct RouteSnap {
  UnscaledPoint start;
  UnscaledPoint end;
  double start_snap = 0.0;  ///< unscaled distance moved by snapping (>= 0)
  double end_snap = 0.0;
};

/// Maps (x, s1) -> (y, s2) to unscaled grid points (snapped down). Throws
/// DomainError for inadmissible endpoints, y - x < -2^{-1} n^{1/3} s12.
RouteSnap snap_route(const NoiseField& field, const CompatibleTriple& triple, double x, double y);

/// 2^{-1/2} n^{-1/3} (E - (j - i) - (end.x - start.x)): the weight of a zigzag
/// whose unscaled preimage carries energy E between the given points.
double weight_from_energy(int n, double energy, UnscaledPoint start, UnscaledPoint end) noexcept;

/// Wgt_n[(x, s1) -> (y, s2)], or the parabolically adjusted weight
/// Wgt + 2^{-1/2} (y - x)^2 / s12 when `parabolic` is set. The horizontal
/// centering uses the snapped endpoints, so the value is the exact maximum
/// zigzag weight between the grid points reported by snap_route.
double weight(const NoiseField& field, const CompatibleTriple& triple, double x, double y, bool parabolic = false);

/// Image of a staircase under R_n, stored with its departure table
/// phi(s) = sup{x : (x, s) in zigzag} for s in [s1, s2] cap n^{-1}Z.
class Zigzag {
 public:
  Zigzag() = default;
  Zigzag(Staircase staircase, int n);

  [[nodiscard]] const Staircase& staircase() const noexcept { return staircase_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int first_level() const noexcept { return staircase_.start.level; }
  [[nodiscard]] int last_level() const noexcept { return staircase_.end.level; }
  [[nodiscard]] double s1() const noexcept { return static_cast<double>(first_level()) / n_; }
  [[nodiscard]] double s2() const noexcept { return static_cast<double>(last_level()) / n_; }
  [[nodiscard]] ScaledPoint start() const noexcept { return scale_point(n_, staircase_.start); }
  [[nodiscard]] ScaledPoint end() const noexcept { return scale_point(n_, staircase_.end); }

  /// phi(s); s must be a lattice height within the lifetime.
  [[nodiscard]] double at(double s) const;
  [[nodiscard]] double at_level(int level) const;
  /// Scaled horizontal segment [left, right] of the zigzag at a given level.
  [[nodiscard]] std::pair<double, double> segment_at_level(int level) const;
  [[nodiscard]] const std::vector<double>& departures() const noexcept { return phi_; }

 private:
  Staircase staircase_;
  int n_ = 1;
  std::vector<double> phi_;
};

/// A maximum-weight zigzag between two scaled endpoints.
struct PolymerPath {
  Zigzag zigzag;
  double weight = 0.0;
  double energy = 0.0;
  ScaledPoint requested_start;
  ScaledPoint requested_end;

  [[nodiscard]] double at(double s) const { return zigzag.at(s); }
};

PolymerPath polymer(const NoiseField& field, const CompatibleTriple& triple, double x, double y);

/// rho(s) with the departure (sup) convention.
inline double polymer_at(const PolymerPath& p, double s) { return p.at(s); }

/// Fluc_n[(x, s1) -> (y, s2); h]: the largest horizontal distance between the
/// polymer's height-h segment and the chord joining its endpoints. Both
/// endpoints of the segment are examined; the sup over the segment is attained
/// at one of them.
double fluc(const PolymerPath& p, double h);

}  // namespace kpzlab
