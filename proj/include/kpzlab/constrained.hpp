#pragma once

#include <optional>
#include <vector>

#include "kpzlab/scaled.hpp"

namespace kpzlab {

/// Per-level window of admissible departure indices, for levels
/// first_level .. first_level + lo.size() - 1. An empty window has lo > hi.
struct Tube {
  int first_level = 0;
  std::vector<Index> lo;
  std::vector<Index> hi;

  [[nodiscard]] bool contains(int level, Index i) const noexcept {
    const auto r = static_cast<std::size_t>(level - first_level);
    return i >= lo[r] && i <= hi[r];
  }
};

/// Tube of scaled half-width `half_width` around the reference departures
/// phi(k/n) over levels [level1, level2]. An infinite half width admits the whole grid.
Tube make_tube(const NoiseField& field, const Zigzag& reference, int level1, int level2, double half_width);

/// Max energy over staircases from (first, start_level) to (y, end_level) for each
/// grid index y in [first, last], restricted to departures inside the tube at
/// every level except at most `budget` levels strictly between the end levels.
/// The start and end levels must depart inside the tube. Infeasible entries are -inf.
std::vector<double> tube_constrained_profile(const NoiseField& field, Index first, Index last, int start_level,
                                             int end_level, const Tube& tube, int budget);

/// Largest number of violating levels allowed for closeness fraction 1 - chi
/// over `level_count` lattice heights.
int violation_budget(double chi, int level_count);

/// Wgt*_n[(start) -> (end); (reference, theta, 1 - chi)-close]: the maximum weight
/// of grid zigzags whose departures lie within s12^{2/3} theta of the reference
/// at s1, at s2, and at all but a chi fraction of the lattice heights. No
/// disjointness from the reference is imposed. Returns nullopt when no zigzag
/// qualifies.
std::optional<double> constrained_max_weight(const NoiseField& field, int n, ScaledPoint start, ScaledPoint end,
                                             const Zigzag& reference, double theta, double chi);

}  // namespace kpzlab
