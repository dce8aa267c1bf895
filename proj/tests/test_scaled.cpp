#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kpzlab/scaled.hpp"
#include "oracles.hpp"

using namespace kpzlab;

TEST_CASE("scaling map anchors and round trip") {
  const int n = 27;
  const auto o = scale_point(n, PlanarPoint{0.0, 0.0});
  CHECK(o.x == 0.0);
  CHECK(o.t == 0.0);
  const auto top = scale_point(n, PlanarPoint{27.0, 27.0});
  CHECK(top.x == doctest::Approx(0.0));
  CHECK(top.t == doctest::Approx(1.0));
  const auto axis = scale_point(n, PlanarPoint{2.0 * 9.0 * 0.7, 0.0});
  CHECK(axis.x == doctest::Approx(0.7).epsilon(1e-12));
  for (double v1 : {-3.0, 0.0, 5.5, 40.0}) {
    for (double v2 : {0.0, 4.0, 27.0}) {
      const auto back = unscale_point(n, scale_point(n, PlanarPoint{v1, v2}));
      CHECK(std::abs(back.v1 - v1) <= 1e-12 * std::max(1.0, std::abs(v1)));
      CHECK(std::abs(back.v2 - v2) <= 1e-12 * std::max(1.0, std::abs(v2)));
    }
  }
}

TEST_CASE("shear transform") {
  const ScaledPoint p{0.3, 0.0};
  CHECK(shear_transform(2.0, p).x == 0.3);
  const ScaledPoint q{0.3, 0.6};
  CHECK(shear_transform(0.0, q).x == q.x);
  const auto r = shear_transform(-1.5, shear_transform(1.5, q));
  CHECK(r.x == doctest::Approx(q.x).epsilon(1e-15));
  CHECK(r.t == q.t);
}

TEST_CASE("compatible triples") {
  const CompatibleTriple t(10, 0.2, 0.7);
  CHECK(t.level1() == 2);
  CHECK(t.level2() == 7);
  CHECK(t.s12() == doctest::Approx(0.5));
  CHECK_THROWS_AS(CompatibleTriple(10, 0.25, 0.7), DomainError);
  CHECK_THROWS_AS(CompatibleTriple(10, 0.7, 0.2), DomainError);
  CHECK_THROWS_AS(CompatibleTriple(0, 0.0, 1.0), DomainError);
}

TEST_CASE("weight formula zero point") {
  const int n = 8;
  const double x = 0.1;
  const double y = 0.35;
  const double s12 = 0.5;
  const double n23 = n_two_thirds(n);
  const UnscaledPoint start{2.0 * n23 * x, 0};
  const UnscaledPoint end{n * s12 + 2.0 * n23 * y, 4};
  const double energy = 2.0 * n * s12 + 2.0 * n23 * (y - x);
  CHECK(std::abs(weight_from_energy(n, energy, start, end)) < 1e-12);
}

TEST_CASE("weight agrees with the geodesic energy and the parabolic term") {
  const int n = 16;
  const auto f = NoiseField::generate(n + 1, -10.0, 30.0, 0.02, 5, 0);
  const CompatibleTriple t(n, 0.25, 1.0);
  const double w = weight(f, t, 0.1, -0.2);
  const auto p = polymer(f, t, 0.1, -0.2);
  CHECK(std::abs(p.weight - w) <= 1e-9 * std::max(1.0, std::abs(w)));
  const auto r = snap_route(f, t, 0.1, -0.2);
  CHECK(p.weight == doctest::Approx(weight_from_energy(n, p.energy, r.start, r.end)).epsilon(1e-12));
  CHECK(weight(f, t, 0.2, 0.2, true) == weight(f, t, 0.2, 0.2, false));
  const double par = weight(f, t, 0.1, -0.2, true);
  CHECK(par - w == doctest::Approx(0.09 / (std::numbers::sqrt2 * 0.75)));
}

TEST_CASE("inadmissible endpoints are refused") {
  const int n = 8;
  const auto f = NoiseField::generate(n + 1, -20.0, 20.0, 0.05, 5, 0);
  const CompatibleTriple t(n, 0.0, 0.5);
  const double limit = 0.5 * 2.0 * 0.5;
  CHECK_NOTHROW(weight(f, t, 0.0, -limit + 1e-6));
  CHECK_THROWS_AS(weight(f, t, 0.0, -limit - 0.01), DomainError);
  CHECK_THROWS_AS(weight(f, t, 100.0, 100.0), DomainError);
}

TEST_CASE("scaling principle on a shared field") {
  const int n = 24;
  const auto f = NoiseField::generate(n + 1, -10.0, 40.0, 0.01, 17, 3);
  const CompatibleTriple t(n, 0.25, 0.75);
  const double s12 = t.s12();
  const int n2 = 12;
  const double kappa = t.s1() / s12;
  const CompatibleTriple t2(n2, kappa, kappa + 1.0);
  for (double x : {-0.3, 0.0, 0.2}) {
    for (double y : {-0.1, 0.25}) {
      const double lhs = weight(f, t, x, y);
      const double rhs = std::cbrt(s12) * weight(f, t2, x * std::pow(s12, -2.0 / 3.0), y * std::pow(s12, -2.0 / 3.0));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("polymer departures match the brute-force staircase image") {
  const int n = 3;
  const auto f = oracle::random_field(n + 1, 13, 71, 0.5);
  const CompatibleTriple t(n, 0.0, 1.0);
  const double n23 = n_two_thirds(n);
  const double x = 0.5 / (2.0 * n23) * 2.0;
  const auto p = polymer(f, t, x, 0.0);
  const auto r = snap_route(f, t, x, 0.0);
  const auto i0 = f.grid_index(r.start.x);
  const auto i1 = f.grid_index(r.end.x);
  const auto best = oracle::brute_max(f, i0, i1, 0, n);
  for (int k = 0; k <= n; ++k) {
    const double z = k < n ? f.x_at(best.jumps[static_cast<std::size_t>(k)]) : r.end.x;
    CHECK(polymer_at(p, static_cast<double>(k) / n) == doctest::Approx((z - k) / (2.0 * n23)));
  }
  CHECK_THROWS_AS((void)p.at(0.5), DomainError);
}

TEST_CASE("leftmost polymers are ordered") {
  const int n = 20;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const auto f = NoiseField::generate(n + 1, -15.0, 40.0, 0.02, 23, r);
    const CompatibleTriple t(n, 0.0, 1.0);
    const auto lo = polymer(f, t, -0.2, -0.1);
    const auto hi = polymer(f, t, 0.1, 0.3);
    for (int k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / n;
      CHECK(lo.at(s) <= hi.at(s));
    }
  }
}

TEST_CASE("fluc on hand instances") {
  const int n = 8;
  const double n23 = n_two_thirds(n);
  // Straight staircase (0,0) -> (8,8) with unit steps: every segment has length one.
  Staircase s{{0.0, 0}, {8.0, 8}, {}};
  for (int k = 1; k <= 8; ++k) s.jumps.push_back(static_cast<double>(k));
  PolymerPath p;
  p.zigzag = Zigzag(s, n);
  for (int k = 0; k < n; ++k) {
    const double h = static_cast<double>(k) / n;
    CHECK(fluc(p, h) == doctest::Approx(1.0 / (2.0 * n23)));
  }
  // The top segment collapses onto the end point.
  CHECK(fluc(p, 1.0) == doctest::Approx(0.0));
  // A corner: vertical to level 8 at x=0, then horizontal to x=8.
  Staircase c{{0.0, 0}, {8.0, 8}, std::vector<double>(8, 0.0)};
  PolymerPath q;
  q.zigzag = Zigzag(c, n);
  // At height 1/2 the zigzag point is x = -4 / (2 n23), chord at 0.
  CHECK(fluc(q, 0.5) == doctest::Approx(4.0 / (2.0 * n23)));
  CHECK(fluc(q, 0.0) == doctest::Approx(0.0));
  // Top segment runs from -8/(2 n23) to 0.
  CHECK(fluc(q, 1.0) == doctest::Approx(8.0 / (2.0 * n23)));
  CHECK_THROWS_AS(fluc(q, 1.5), DomainError);
  CHECK_THROWS_AS(fluc(q, 0.3), DomainError);
}
