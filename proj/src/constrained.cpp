#include "kpzlab/constrained.hpp"

#include <algorithm>
#include <cmath>

namespace kpzlab {

Tube make_tube(const NoiseField& field, const Zigzag& reference, int level1, int level2, double half_width) {
  if (level1 < reference.first_level() || level2 > reference.last_level() || level2 < level1) {
    throw DomainError("reference path does not cover the requested lifetime");
  }
  if (!(half_width >= 0.0)) throw DomainError("tube half width must be non-negative");
  Tube tube;
  tube.first_level = level1;
  const auto count = static_cast<std::size_t>(level2 - level1 + 1);
  tube.lo.resize(count);
  tube.hi.resize(count);
  const double scale = 2.0 * n_two_thirds(reference.n());
  const double slack = NoiseField::kSnapSlack;
  for (int k = level1; k <= level2; ++k) {
    const auto r = static_cast<std::size_t>(k - level1);
    if (std::isinf(half_width)) {
      tube.lo[r] = 0;
      tube.hi[r] = field.grid_size() - 1;
      continue;
    }
    const double phi = reference.at_level(k);
    const double left = (k + scale * (phi - half_width) - field.x_min()) / field.step();
    const double right = (k + scale * (phi + half_width) - field.x_min()) / field.step();
    tube.lo[r] = std::max<Index>(0, static_cast<Index>(std::ceil(left - slack)));
    tube.hi[r] = std::min<Index>(field.grid_size() - 1, static_cast<Index>(std::floor(right + slack)));
  }
  return tube;
}

int violation_budget(double chi, int level_count) {
  if (!(chi >= 0.0 && chi <= 1.0)) throw DomainError("chi must lie in [0, 1]");
  return static_cast<int>(std::floor(chi * level_count + 1e-12));
}

std::vector<double> tube_constrained_profile(const NoiseField& field, Index first, Index last, int start_level,
                                             int end_level, const Tube& tube, int budget) {
  if (end_level < start_level || last < first) throw DomainError("constrained route is not ordered");
  if (tube.first_level > start_level ||
      tube.first_level + static_cast<int>(tube.lo.size()) - 1 < end_level) {
    throw DomainError("tube does not cover the route levels");
  }
  budget = std::max(0, budget);
  const auto width = static_cast<std::size_t>(last - first + 1);
  const auto states = static_cast<std::size_t>(budget + 1);
  constexpr double kNegInf = detail::kMinusInf;

  // f[v * width + u]: best energy departing the current level at first + u with v violations so far.
  std::vector<double> f(states * width, kNegInf);
  std::vector<double> g(states * width, kNegInf);
  const double base = field(start_level, first);
  for (std::size_t u = 0; u < width; ++u) {
    const Index i = first + static_cast<Index>(u);
    if (tube.contains(start_level, i)) f[u] = field(start_level, i) - base;
  }

  for (int k = start_level + 1; k <= end_level; ++k) {
    const bool endpoint = k == end_level;
    for (std::size_t v = 0; v < states; ++v) {
      double best = kNegInf;
      const double* fv = f.data() + v * width;
      double* gv = g.data() + v * width;
      for (std::size_t u = 0; u < width; ++u) {
        const double cand = fv[u] - field(k, first + static_cast<Index>(u));
        if (cand > best) best = cand;
        gv[u] = best;
      }
    }
    for (std::size_t u = 0; u < width; ++u) {
      const Index i = first + static_cast<Index>(u);
      const double b = field(k, i);
      const bool inside = tube.contains(k, i);
      for (std::size_t v = 0; v < states; ++v) {
        double value = kNegInf;
        if (inside) {
          value = g[v * width + u];
        } else if (!endpoint && v > 0) {
          value = g[(v - 1) * width + u];
        }
        f[v * width + u] = value == kNegInf ? kNegInf : value + b;
      }
    }
  }

  std::vector<double> out(width, kNegInf);
  for (std::size_t v = 0; v < states; ++v) {
    for (std::size_t u = 0; u < width; ++u) out[u] = std::max(out[u], f[v * width + u]);
  }
  return out;
}

std::optional<double> constrained_max_weight(const NoiseField& field, int n, ScaledPoint start, ScaledPoint end,
                                             const Zigzag& reference, double theta, double chi) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  const CompatibleTriple triple(n, start.t, end.t);
  const auto route = snap_route(field, triple, start.x, end.x);
  const int levels = triple.level2() - triple.level1() + 1;
  const double half_width = std::isinf(theta) ? theta : std::pow(triple.s12(), 2.0 / 3.0) * theta;
  const Tube tube = make_tube(field, reference, triple.level1(), triple.level2(), half_width);
  const Index first = field.grid_index(route.start.x);
  const Index last = field.grid_index(route.end.x);
  const auto values =
      tube_constrained_profile(field, first, last, triple.level1(), triple.level2(), tube, violation_budget(chi, levels));
  const double energy = values.back();
  if (energy == detail::kMinusInf) return std::nullopt;
  return weight_from_energy(n, energy, route.start, route.end);
}

}  // namespace kpzlab
