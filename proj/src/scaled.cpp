#include "kpzlab/scaled.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace kpzlab {

namespace {

int lattice_level(int n, double s) {
  const double scaled = s * n;
  const auto level = std::llround(scaled);
  if (std::abs(scaled - static_cast<double>(level)) > 1e-9 * std::max(1.0, std::abs(scaled))) {
    std::ostringstream msg;
    msg << "height " << s << " is not a multiple of 1/" << n;
    throw DomainError(msg.str());
  }
  return static_cast<int>(level);
}

}  // namespace

CompatibleTriple::CompatibleTriple(int n, double s1, double s2) : n_(n) {
  if (n < 1) throw DomainError("n must be positive");
  level1_ = lattice_level(n, s1);
  level2_ = lattice_level(n, s2);
  if (level2_ <= level1_) throw DomainError("compatible triple needs s1 < s2");
}

ScaledPoint scale_point(int n, PlanarPoint p) noexcept {
  return {0.5 * (p.v1 - p.v2) / n_two_thirds(n), p.v2 / n};
}

ScaledPoint scale_point(int n, UnscaledPoint p) noexcept {
  return scale_point(n, PlanarPoint{p.x, static_cast<double>(p.level)});
}

PlanarPoint unscale_point(int n, ScaledPoint p) noexcept {
  const double v2 = p.t * n;
  return {v2 + 2.0 * n_two_thirds(n) * p.x, v2};
}

ScaledPoint shear_transform(double K, ScaledPoint p) noexcept { return {p.x + K * p.t, p.t}; }

RouteSnap snap_route(const NoiseField& field, const CompatibleTriple& triple, double x, double y) {
  const int n = triple.n();
  if (y - x < -0.5 * std::cbrt(static_cast<double>(n)) * triple.s12() * (1.0 + 1e-12)) {
    throw DomainError("inadmissible endpoints: y - x < -n^{1/3} s12 / 2");
  }
  const double n23 = n_two_thirds(n);
  const double u1 = triple.level1() + 2.0 * n23 * x;
  const double u2 = triple.level2() + 2.0 * n23 * y;
  RouteSnap r;
  const Index i1 = field.snap(u1);
  const Index i2 = field.snap(u2);
  r.start = {field.x_at(i1), triple.level1()};
  r.end = {field.x_at(i2), triple.level2()};
  r.start_snap = std::max(0.0, u1 - r.start.x);
  r.end_snap = std::max(0.0, u2 - r.end.x);
  if (r.end.x < r.start.x) throw DomainError("endpoints collapse out of order on the grid");
  return r;
}

double weight_from_energy(int n, double energy, UnscaledPoint start, UnscaledPoint end) noexcept {
  const double centering = static_cast<double>(end.level - start.level) + (end.x - start.x);
  return (energy - centering) / (std::numbers::sqrt2 * std::cbrt(static_cast<double>(n)));
}

double weight(const NoiseField& field, const CompatibleTriple& triple, double x, double y, bool parabolic) {
  const auto route = snap_route(field, triple, x, y);
  const Index first = field.grid_index(route.start.x);
  const Index last = field.grid_index(route.end.x);
  const auto f = detail::sweep(field, first, last, route.start.level, route.end.level);
  double w = weight_from_energy(triple.n(), f.back(), route.start, route.end);
  if (parabolic) w += (y - x) * (y - x) / (std::numbers::sqrt2 * triple.s12());
  return w;
}

Zigzag::Zigzag(Staircase staircase, int n) : staircase_(std::move(staircase)), n_(n) {
  if (n < 1) throw DomainError("n must be positive");
  const double denom = 2.0 * n_two_thirds(n);
  phi_.reserve(static_cast<std::size_t>(last_level() - first_level() + 1));
  for (int k = first_level(); k <= last_level(); ++k) {
    phi_.push_back((staircase_.z(k + 1) - k) / denom);
  }
}

double Zigzag::at_level(int level) const {
  if (level < first_level() || level > last_level()) throw DomainError("height outside the zigzag lifetime");
  return phi_[static_cast<std::size_t>(level - first_level())];
}

double Zigzag::at(double s) const { return at_level(lattice_level(n_, s)); }

std::pair<double, double> Zigzag::segment_at_level(int level) const {
  if (level < first_level() || level > last_level()) throw DomainError("height outside the zigzag lifetime");
  const double denom = 2.0 * n_two_thirds(n_);
  return {(staircase_.z(level) - level) / denom, (staircase_.z(level + 1) - level) / denom};
}

PolymerPath polymer(const NoiseField& field, const CompatibleTriple& triple, double x, double y) {
  const auto route = snap_route(field, triple, x, y);
  auto path = geodesic(field, route.start, route.end);
  PolymerPath p;
  p.energy = staircase_energy(field, path);
  p.weight = weight_from_energy(triple.n(), p.energy, route.start, route.end);
  p.requested_start = {x, triple.s1()};
  p.requested_end = {y, triple.s2()};
  p.zigzag = Zigzag(std::move(path), triple.n());
  return p;
}

double fluc(const PolymerPath& p, double h) {
  const auto& z = p.zigzag;
  const int n = z.n();
  const double scaled = h * n;
  const auto level = static_cast<int>(std::llround(scaled));
  if (std::abs(scaled - level) > 1e-9 * std::max(1.0, std::abs(scaled)) || level < z.first_level() ||
      level > z.last_level()) {
    throw DomainError("fluc height outside the polymer lifetime");
  }
  const auto a = z.start();
  const auto b = z.end();
  const double s12 = b.t - a.t;
  const double t = static_cast<double>(level) / n;
  const double chord = ((b.t - t) * a.x + (t - a.t) * b.x) / s12;
  const auto [left, right] = z.segment_at_level(level);
  return std::max(std::abs(left - chord), std::abs(right - chord));
}

}  // namespace kpzlab
