#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "kpzlab/noise_field.hpp"

namespace kpzlab {

/// A point (x, level) of the unscaled environment; x is grid-aligned.
struct UnscaledPoint {
  double x = 0.0;
  int level = 0;
};

/// Non-decreasing jump list z_{i+1}, ..., z_j of a staircase from (x, i) to
/// (y, j), with the conventions z_i = x and z_{j+1} = y. Jump z_k is where the
/// path moves from level k-1 up to level k.
struct Staircase {
  UnscaledPoint start;
  UnscaledPoint end;
  std::vector<double> jumps;

  /// z_k for k in [start.level, end.level + 1], conventions included.
  [[nodiscard]] double z(int k) const {
    if (k <= start.level) return start.x;
    if (k > end.level) return end.x;
    return jumps[static_cast<std::size_t>(k - start.level - 1)];
  }
};

/// y -> M[(start) -> (y, target_level)] on grid points y >= start.x.
struct EnergyProfile {
  UnscaledPoint start;
  int target_level = 0;
  Index first_index = 0;  ///< grid index of start.x
  double x_min = 0.0;
  double step = 1.0;
  std::vector<double> values;  ///< values[i] is the maximum at grid index first_index + i

  [[nodiscard]] double x_at(std::size_t i) const noexcept {
    return x_min + step * static_cast<double>(first_index + static_cast<Index>(i));
  }
  /// Value at grid point y (must be on grid and >= start.x).
  [[nodiscard]] double at(double y) const;
};

/// E(phi) = sum_k B(z_{k+1}, k) - B(z_k, k). Throws DomainError on an invalid
/// staircase (non-monotone or off-grid jumps, levels outside the field).
double staircase_energy(const NoiseField& field, const Staircase& s);

EnergyProfile max_energy_profile(const NoiseField& field, UnscaledPoint start, int target_level);

/// Leftmost geodesic: among maximizers, the smallest jump is taken at each level
/// while backtracking from the end point.
Staircase geodesic(const NoiseField& field, UnscaledPoint start, UnscaledPoint end);

/// Continuum estimate from coupled grid maxima on the same Brownian paths at
/// steps delta (coarse) and delta/2 (fine). Grid maxima fall short of the
/// continuum by a term linear in sqrt(delta) to leading order; this cancels it.
inline double sqrt_step_extrapolate(double coarse, double fine) noexcept {
  return (std::numbers::sqrt2 * fine - coarse) / (std::numbers::sqrt2 - 1.0);
}

namespace detail {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Level-by-level max-plus sweep on grid indices [first, last]:
///   f_i(y)     = B(y, i) - B(first, i)
///   f_{k+1}(y) = max_{first <= z <= y} [f_k(z) - B(z, k+1)] + B(y, k+1).
/// Returns f_target on [first, last]. When argmax is non-null it receives, for
/// each level k in (start_level, target_level], the leftmost maximizing z per y
/// (row-major, (target_level - start_level) rows of width last - first + 1).
template <FieldLike F>
std::vector<double> sweep(const F& field, Index first, Index last, int start_level, int target_level,
                          std::vector<std::int32_t>* argmax = nullptr) {
  const auto width = static_cast<std::size_t>(last - first + 1);
  std::vector<double> f(width);
  const double base = field(start_level, first);
  for (std::size_t u = 0; u < width; ++u) f[u] = field(start_level, first + static_cast<Index>(u)) - base;
  if (argmax != nullptr) {
    argmax->assign(width * static_cast<std::size_t>(target_level - start_level), 0);
  }
  for (int k = start_level + 1; k <= target_level; ++k) {
    double best = kMinusInf;
    std::int32_t best_at = 0;
    std::int32_t* arg_row =
        argmax != nullptr ? argmax->data() + width * static_cast<std::size_t>(k - start_level - 1) : nullptr;
    for (std::size_t u = 0; u < width; ++u) {
      const double b = field(k, first + static_cast<Index>(u));
      const double cand = f[u] - b;
      if (cand > best) {
        best = cand;
        best_at = static_cast<std::int32_t>(u);
      }
      f[u] = best + b;
      if (arg_row != nullptr) arg_row[u] = best_at;
    }
  }
  return f;
}

/// Backtracks a jump list (as offsets from `first`) from the argmax table.
std::vector<std::int32_t> backtrack(std::span<const std::int32_t> argmax, std::size_t width, int levels_above,
                                    std::int32_t end_offset);

}  // namespace detail

}  // namespace kpzlab
