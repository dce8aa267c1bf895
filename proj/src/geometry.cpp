#include "kpzlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpzlab {

namespace {

int path_n(const PolymerPath& p) { return p.zigzag.n(); }

/// Per-level energy prefix: prefix[k - first] = sum_{j = first+1}^{k} (B(z_{j+1}, j) - B(z_j, j)).
std::vector<double> energy_prefix(const NoiseField& field, const Staircase& s) {
  std::vector<double> prefix{0.0};
  for (int k = s.start.level + 1; k <= s.end.level; ++k) {
    const double e = field(k, field.grid_index(s.z(k + 1))) - field(k, field.grid_index(s.z(k)));
    prefix.push_back(prefix.back() + e);
  }
  return prefix;
}

}  // namespace

std::vector<std::pair<int, int>> dyadic_pairs(const Zigzag& z, int k) {
  if (k < 0) throw DomainError("dyadic scale must be nonnegative");
  const int n = z.n();
  const double hi = std::ldexp(1.0, -k);
  const double lo = std::ldexp(1.0, -k - 1);
  std::vector<std::pair<int, int>> out;
  for (int l1 = z.first_level(); l1 <= z.last_level(); ++l1) {
    for (int l2 = l1 + 1; l2 <= z.last_level(); ++l2) {
      const double h = static_cast<double>(l2 - l1) / n;
      if (h > hi * (1.0 + 1e-12)) break;
      if (h > lo * (1.0 + 1e-12)) out.emplace_back(l1, l2);
    }
  }
  return out;
}

double modcon_geometry_stat(std::span<const PolymerPath> paths, int k) {
  double sup = -1.0;
  for (const auto& p : paths) {
    const int n = path_n(p);
    for (const auto& [l1, l2] : dyadic_pairs(p.zigzag, k)) {
      const double h = static_cast<double>(l2 - l1) / n;
      const double d = std::abs(p.zigzag.at_level(l2) - p.zigzag.at_level(l1));
      sup = std::max(sup, d / (std::pow(h, 2.0 / 3.0) * std::cbrt(std::log1p(1.0 / h))));
    }
  }
  if (sup < 0.0) throw DomainError("no height pair at this dyadic scale");
  return sup;
}

double subpath_weight(const NoiseField& field, const PolymerPath& p, int l1, int l2) {
  const auto& s = p.zigzag.staircase();
  if (l1 < s.start.level || l2 > s.end.level || l2 <= l1) throw DomainError("subpath levels outside the polymer");
  double e = 0.0;
  for (int k = l1 + 1; k <= l2; ++k) {
    e += field(k, field.grid_index(s.z(k + 1))) - field(k, field.grid_index(s.z(k)));
  }
  return weight_from_energy(path_n(p), e, {s.z(l1 + 1), l1}, {s.z(l2 + 1), l2});
}

double modcon_weight_stat(const NoiseField& field, std::span<const PolymerPath> paths, int k) {
  if (k < 1) throw DomainError("weight modulus needs dyadic scale k >= 1");
  double sup = -1.0;
  for (const auto& p : paths) {
    const auto& s = p.zigzag.staircase();
    const auto prefix = energy_prefix(field, s);
    const int n = path_n(p);
    for (const auto& [l1, l2] : dyadic_pairs(p.zigzag, k)) {
      const double e = prefix[static_cast<std::size_t>(l2 - s.start.level)] -
                       prefix[static_cast<std::size_t>(l1 - s.start.level)];
      const double w = weight_from_energy(n, e, {s.z(l1 + 1), l1}, {s.z(l2 + 1), l2});
      const double h = static_cast<double>(l2 - l1) / n;
      sup = std::max(sup, std::abs(w) / (std::cbrt(h) * std::pow(std::log(1.0 / h), 2.0 / 3.0)));
    }
  }
  if (sup < 0.0) throw DomainError("no height pair at this dyadic scale");
  return sup;
}

DeviationStat deviation_stat(std::span<const PolymerPath> paths, double a, double r) {
  if (!(a > 0.0 && a <= 0.25)) throw DomainError("deviation fraction a must lie in (0, 1/4]");
  if (paths.empty()) throw DomainError("deviation statistic needs paths");
  DeviationStat d;
  d.a = a;
  d.r = r;
  for (const auto& p : paths) {
    const auto& z = p.zigzag;
    const int n = z.n();
    const int l1 = z.first_level();
    const int l2 = z.last_level();
    const double s12 = static_cast<double>(l2 - l1) / n;
    d.threshold = r * std::pow(a * s12, 2.0 / 3.0) * std::cbrt(std::log(1.0 / a));
    double sup = -1.0;
    for (int l = l1; l <= l2; ++l) {
      const double frac = static_cast<double>(l - l1) / (l2 - l1);
      const bool low = frac >= a - 1e-12 && frac <= 2.0 * a + 1e-12;
      const bool high = frac >= 1.0 - 2.0 * a - 1e-12 && frac <= 1.0 - a + 1e-12;
      if (!low && !high) continue;
      sup = std::max(sup, fluc(p, static_cast<double>(l) / n));
    }
    if (sup < 0.0) throw DomainError("no lattice height in the deviation window");
    d.sup_fluc.push_back(sup);
    d.exceed.add(sup > d.threshold);
  }
  d.p = static_cast<double>(d.exceed.successes) / static_cast<double>(d.exceed.trials);
  std::tie(d.ci_lo, d.ci_hi) = proportion_ci(d.exceed.successes, d.exceed.trials);
  return d;
}

CliffCensus cliff_census(const Staircase& g, int A) {
  const int n = g.end.level - g.start.level;
  if (A < 1 || n <= A) throw DomainError("cliff census needs 1 <= A < n");
  if (g.start.level != 0 || g.start.x != 0.0 || std::abs(g.end.x - n) > 1e-9) {
    throw DomainError("cliff census needs a geodesic from (0,0) to (n,n)");
  }
  if (g.jumps.size() != static_cast<std::size_t>(n) || !std::is_sorted(g.jumps.begin(), g.jumps.end())) {
    throw DomainError("malformed geodesic");
  }
  CliffCensus c;
  c.A = A;
  c.m = (n - 1) / A;
  for (int i = 0; i <= c.m; ++i) c.X.push_back(g.z(i * A + 1));
  c.X.push_back(static_cast<double>(n));
  for (double x : c.X) c.Z.push_back(static_cast<long long>(std::floor(x + 1e-9)));
  for (int i = 0; i <= c.m; ++i) {
    c.Psi.push_back(c.Z[static_cast<std::size_t>(i) + 1] - c.Z[static_cast<std::size_t>(i)]);
    if (c.Psi.back() <= 2) c.I.push_back(i);
  }
  c.fraction = static_cast<double>(c.I.size()) / c.m;
  return c;
}

Steadiness steadiness(const PolymerPath& p, double beta1) {
  const auto& z = p.zigzag;
  const int n = z.n();
  if (z.first_level() != 0 || z.last_level() != n) throw DomainError("steadiness needs a polymer over [0, 1]");
  const double n23 = n_two_thirds(n);
  Steadiness s;
  double sum = 0.0;
  double unscaled = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double advance = z.staircase().z(i + 1) - z.staircase().z(i);
    const double w = advance / (2.0 * n23);
    s.omega.push_back(w);
    sum += w;
    unscaled += advance;
    if (w >= beta1 / n23) ++s.count_at_least;
  }
  s.residual = std::abs(sum - 0.5 * std::cbrt(static_cast<double>(n)));
  s.unscaled_residual = std::abs(unscaled - (z.staircase().end.x - z.staircase().start.x));
  return s;
}

RegularityResult regularity_check(const Zigzag& z, double R) {
  RegularityResult r;
  const int n = z.n();
  const auto& phi = z.departures();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = i + 1; j < phi.size(); ++j) {
      const double h = static_cast<double>(j - i) / n;
      r.worst_ratio = std::max(r.worst_ratio, std::abs(phi[j] - phi[i]) / std::pow(h, 2.0 / 3.0));
    }
  }
  r.holds = r.worst_ratio <= R;
  return r;
}

Zigzag straight_reference(int n) {
  Staircase s{{0.0, 0}, {static_cast<double>(n), n}, {}};
  for (int k = 1; k <= n; ++k) s.jumps.push_back(static_cast<double>(k - 1));
  return Zigzag(std::move(s), n);
}

bool slender_hypothesis_holds(int n, int ell, double theta) noexcept {
  return std::ldexp(1.0, ell) <= n * std::pow(theta, 40.0);
}

SlenderReplica slender_shortfall(const NoiseField& field, const Zigzag& reference, const SlenderConfig& config) {
  const int n = config.n;
  if (reference.n() != n || reference.first_level() != 0 || reference.last_level() != n) {
    throw DomainError("slender reference must be an n-zigzag over [0, 1]");
  }
  if (config.ell < 0) throw DomainError("ell must be nonnegative");
  const double span = std::ldexp(static_cast<double>(n), -config.ell);
  const auto levels = static_cast<int>(std::llround(span));
  if (levels < 1 || std::abs(span - levels) > 1e-9) throw DomainError("n 2^{-ell} must be a positive integer");
  if (config.thetas.empty() || config.offsets.empty()) throw DomainError("slender config needs thetas and offsets");
  for (double t : config.thetas) {
    if (!(t > 0.0)) throw DomainError("theta must be positive");
  }

  SlenderReplica out;
  const double min_theta = *std::min_element(config.thetas.begin(), config.thetas.end());
  out.regular = regularity_check(reference, std::pow(min_theta, -0.25)).holds;
  out.sup.assign(config.thetas.size(), std::nullopt);
  if (!out.regular) return out;

  const double s12 = static_cast<double>(levels) / n;
  const double width = std::pow(s12, 2.0 / 3.0);
  const double norm = 1.0 / std::cbrt(s12);
  const double n23 = n_two_thirds(n);
  const int stride = std::max(1, levels / 2);
  const int budget = violation_budget(config.chi, levels + 1);
  out.unconstrained_sup = -std::numeric_limits<double>::infinity();

  std::vector<double> theta_list = config.thetas;
  theta_list.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> sups(theta_list.size(), -std::numeric_limits<double>::infinity());

  for (int l1 = 0; l1 + levels <= n; l1 += stride) {
    const int l2 = l1 + levels;
    std::vector<Index> ends;
    for (double o : config.offsets) {
      ends.push_back(field.snap(l2 + 2.0 * n23 * (reference.at_level(l2) + o * width)));
    }
    const Index last = *std::max_element(ends.begin(), ends.end());
    for (std::size_t t = 0; t < theta_list.size(); ++t) {
      const double half = std::isinf(theta_list[t]) ? theta_list[t] : width * theta_list[t];
      const Tube tube = make_tube(field, reference, l1, l2, half);
      for (double o1 : config.offsets) {
        const Index first = field.snap(l1 + 2.0 * n23 * (reference.at_level(l1) + o1 * width));
        if (last < first) continue;
        const auto values = tube_constrained_profile(field, first, last, l1, l2, tube, budget);
        for (Index e : ends) {
          if (e < first) continue;
          if (t == 0) ++out.endpoint_pairs;
          const double energy = values[static_cast<std::size_t>(e - first)];
          if (energy == detail::kMinusInf) continue;
          const double w = norm * weight_from_energy(n, energy, {field.x_at(first), l1}, {field.x_at(e), l2});
          sups[t] = std::max(sups[t], w);
        }
      }
    }
  }
  for (std::size_t t = 0; t < config.thetas.size(); ++t) {
    if (sups[t] != -std::numeric_limits<double>::infinity()) out.sup[t] = sups[t];
  }
  out.unconstrained_sup = sups.back();
  return out;
}

}  // namespace kpzlab
