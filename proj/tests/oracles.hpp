#pragma once

// Exhaustive reference computations for tiny instances.

#include <functional>
#include <limits>
#include <vector>

#include "kpzlab/constrained.hpp"
#include "kpzlab/lpp.hpp"
#include "kpzlab/rng.hpp"

namespace oracle {

using kpzlab::Index;
using kpzlab::NoiseField;

/// Calls visit(jumps) for every nondecreasing list of jump indices
/// z_{i+1} <= ... <= z_j in [first, last].
inline void for_each_staircase(Index first, Index last, int levels_above,
                               const std::function<void(const std::vector<Index>&)>& visit) {
  std::vector<Index> z(static_cast<std::size_t>(levels_above), first);
  std::function<void(int, Index)> rec = [&](int pos, Index lo) {
    if (pos == levels_above) {
      visit(z);
      return;
    }
    for (Index v = lo; v <= last; ++v) {
      z[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, v);
    }
  };
  rec(0, first);
}

inline double energy(const NoiseField& f, Index first, Index last, int start_level, const std::vector<Index>& z) {
  double e = 0.0;
  Index prev = first;
  int k = start_level;
  for (Index next : z) {
    e += f(k, next) - f(k, prev);
    prev = next;
    ++k;
  }
  e += f(k, last) - f(k, prev);
  return e;
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Index> jumps;
};

/// Maximum energy and the lexicographically smallest maximizer, with an optional filter.
inline Best brute_max(const NoiseField& f, Index first, Index last, int start_level, int end_level,
                      const std::function<bool(const std::vector<Index>&)>& admit = nullptr) {
  Best b;
  for_each_staircase(first, last, end_level - start_level, [&](const std::vector<Index>& z) {
    if (admit && !admit(z)) return;
    const double e = energy(f, first, last, start_level, z);
    if (e > b.value) {
      b.value = e;
      b.jumps = z;
    }
  });
  return b;
}

/// Tube admission with a violation budget: departure at level k is z_{k+1},
/// and the end point at the last level.
inline std::function<bool(const std::vector<Index>&)> tube_filter(const kpzlab::Tube& tube, Index last,
                                                                  int start_level, int end_level, int budget) {
  return [=](const std::vector<Index>& z) {
    int violations = 0;
    for (int k = start_level; k <= end_level; ++k) {
      const Index d = k < end_level ? z[static_cast<std::size_t>(k - start_level)] : last;
      if (tube.contains(k, d)) continue;
      if (k == start_level || k == end_level) return false;
      ++violations;
    }
    return violations <= budget;
  };
}

/// Small random field with a fixed grid, values drawn from a seeded stream.
inline NoiseField random_field(int levels, Index points, std::uint64_t seed, double step = 1.0) {
  kpzlab::CounterEngine eng({seed, 0, 77});
  NoiseField::Matrix m(levels, points);
  for (int k = 0; k < levels; ++k) {
    for (Index i = 0; i < points; ++i) m(k, i) = eng.gaussian();
  }
  return NoiseField::from_samples(std::move(m), 0.0, step);
}

}  // namespace oracle
