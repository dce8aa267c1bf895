#include <doctest.h>

#include <cmath>

#include "kpzlab/constrained.hpp"
#include "kpzlab/geometry.hpp"
#include "oracles.hpp"

using namespace kpzlab;

namespace {

Staircase diagonal(int n, std::vector<double> jumps) {
  return Staircase{{0.0, 0}, {static_cast<double>(n), n}, std::move(jumps)};
}

PolymerPath unit_polymer(int n, double step, std::uint64_t seed, std::uint64_t replica) {
  const auto f = NoiseField::generate(n + 1, 0.0, n, step, seed, replica);
  return polymer(f, CompatibleTriple(n, 0.0, 1.0), 0.0, 0.0);
}

}  // namespace

TEST_CASE("cliff census on hand staircases") {
  SUBCASE("unit diagonal: every strip advances A") {
    std::vector<double> j;
    for (int k = 1; k <= 9; ++k) j.push_back(k);
    const auto c = cliff_census(diagonal(9, j), 2);
    CHECK(c.m == 4);
    CHECK(c.X == std::vector<double>{1, 3, 5, 7, 9, 9});
    CHECK(c.Psi == std::vector<long long>{2, 2, 2, 2, 0});
    CHECK(c.I.size() == 5);
    CHECK(c.fraction == doctest::Approx(1.25));
  }
  SUBCASE("wide strips are not cliffs") {
    std::vector<double> j;
    for (int k = 1; k <= 9; ++k) j.push_back(std::min(9.0, 3.0 * ((k - 1) / 2)));
    const auto c = cliff_census(diagonal(9, j), 2);
    CHECK(c.Psi == std::vector<long long>{3, 3, 3, 0, 0});
    CHECK(c.I == std::vector<int>{3, 4});
    CHECK(c.fraction == doctest::Approx(0.5));
  }
  SUBCASE("fractional jumps are floored") {
    const auto c = cliff_census(diagonal(4, {0.5, 1.5, 3.5, 3.75}), 1);
    CHECK(c.Z == std::vector<long long>{0, 1, 3, 3, 4});
    CHECK(c.Psi == std::vector<long long>{1, 2, 0, 1});
  }
  SUBCASE("malformed geodesics") {
    CHECK_THROWS_AS(cliff_census(diagonal(4, {1, 0, 2, 3}), 1), DomainError);
    CHECK_THROWS_AS(cliff_census(diagonal(4, {1, 2, 3}), 1), DomainError);
    CHECK_THROWS_AS(cliff_census(diagonal(4, {1, 2, 3, 4}), 4), DomainError);
  }
}

TEST_CASE("steadiness conserves the horizontal budget") {
  for (std::uint64_t r = 0; r < 5; ++r) {
    const int n = 40;
    const auto p = unit_polymer(n, 0.01, 8, r);
    const auto s = steadiness(p, 0.0);
    CHECK(s.omega.size() == n + 1);
    CHECK(s.count_at_least == n + 1);
    for (double w : s.omega) CHECK(w >= -1e-12);
    CHECK(s.residual <= 1e-9 * 0.5 * std::cbrt(40.0));
    CHECK(s.unscaled_residual <= 1e-9 * n);
  }
}

TEST_CASE("steadiness count is monotone in beta1") {
  const auto p = unit_polymer(40, 0.01, 8, 1);
  std::size_t prev = p.zigzag.departures().size() + 1;
  for (double b : {0.0, 0.1, 0.3, 1.0, 3.0}) {
    const auto s = steadiness(p, b);
    CHECK(s.count_at_least <= prev);
    prev = s.count_at_least;
  }
}

TEST_CASE("straight reference is the zero zigzag") {
  const auto z = straight_reference(16);
  for (double v : z.departures()) CHECK(v == 0.0);
  CHECK(regularity_check(z, 0.0).holds);
}

TEST_CASE("regularity worst ratio on a hand zigzag") {
  // n = 8; departures jump by one grid unit at level 4.
  std::vector<double> j{0, 1, 2, 3, 5, 6, 7, 8};
  const Zigzag z(diagonal(8, j), 8);
  const double unit = 1.0 / (2.0 * 4.0);
  // Largest ratio comes from adjacent levels straddling the jump.
  const auto r = regularity_check(z, 1.0);
  CHECK(r.worst_ratio == doctest::Approx(unit / std::pow(1.0 / 8.0, 2.0 / 3.0)));
  CHECK(r.holds == (r.worst_ratio <= 1.0));
  CHECK_FALSE(regularity_check(z, 0.1).holds);
}

TEST_CASE("dyadic pairs cover exactly the scale band") {
  const auto z = straight_reference(16);
  for (int k = 0; k < 4; ++k) {
    for (const auto& [l1, l2] : dyadic_pairs(z, k)) {
      const double h = (l2 - l1) / 16.0;
      CHECK(h > std::ldexp(1.0, -k - 1));
      CHECK(h <= std::ldexp(1.0, -k));
    }
  }
  CHECK(dyadic_pairs(z, 2).size() == 17 - 3 + 17 - 4);
  CHECK(dyadic_pairs(z, 5).empty());
}

TEST_CASE("modulus statistics are hand-checkable on the zero zigzag") {
  const int n = 16;
  const auto f = NoiseField::generate(n + 1, 0.0, n, 1.0, 4, 0);
  PolymerPath p;
  p.zigzag = straight_reference(n);
  std::vector<PolymerPath> paths{p};
  CHECK(modcon_geometry_stat(paths, 1) == 0.0);
  CHECK_THROWS_AS(modcon_geometry_stat(paths, 6), DomainError);
  CHECK_THROWS_AS(modcon_weight_stat(f, paths, 0), DomainError);

  double expect = 0.0;
  for (const auto& [l1, l2] : dyadic_pairs(p.zigzag, 2)) {
    const double h = (l2 - l1) / 16.0;
    const double w = subpath_weight(f, p, l1, l2);
    expect = std::max(expect, std::abs(w) / (std::cbrt(h) * std::pow(std::log(1.0 / h), 2.0 / 3.0)));
  }
  CHECK(modcon_weight_stat(f, paths, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("subpath weight is the weight of the polymer restricted to its departures") {
  const int n = 30;
  const auto f = NoiseField::generate(n + 1, 0.0, n, 0.05, 2, 3);
  const auto p = polymer(f, CompatibleTriple(n, 0.0, 1.0), 0.0, 0.0);
  const auto& s = p.zigzag.staircase();
  for (auto [l1, l2] : {std::pair{0, n}, std::pair{3, 17}, std::pair{10, 11}}) {
    Staircase sub{{s.z(l1 + 1), l1}, {s.z(l2 + 1), l2}, {}};
    for (int k = l1 + 1; k <= l2; ++k) sub.jumps.push_back(s.z(k));
    const double expect = weight_from_energy(n, staircase_energy(f, sub), sub.start, sub.end);
    CHECK(subpath_weight(f, p, l1, l2) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(subpath_weight(f, p, 5, 5), DomainError);
}

TEST_CASE("deviation statistic: zero zigzag never exceeds a positive threshold") {
  PolymerPath p;
  p.zigzag = straight_reference(64);
  std::vector<PolymerPath> paths(5, p);
  const auto d = deviation_stat(paths, 0.125, 1.0);
  CHECK(d.threshold == doctest::Approx(std::pow(0.125, 2.0 / 3.0) * std::cbrt(std::log(8.0))));
  CHECK(d.exceed.trials == 5);
  CHECK(d.exceed.successes == 0);
  CHECK(d.p == 0.0);
  CHECK_THROWS_AS(deviation_stat(paths, 0.3, 1.0), DomainError);
  // Each horizontal segment spans one grid unit, so any zero threshold is exceeded.
  const auto zero = deviation_stat(paths, 0.125, 0.0);
  CHECK(zero.exceed.successes == 5);
}

TEST_CASE("deviation frequency is nonincreasing in r") {
  std::vector<PolymerPath> paths;
  for (std::uint64_t r = 0; r < 20; ++r) paths.push_back(unit_polymer(32, 0.02, 6, r));
  double prev = 1.0;
  for (double r : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const auto d = deviation_stat(paths, 0.125, r);
    CHECK(d.p <= prev);
    prev = d.p;
  }
}

TEST_CASE("slender sup is nonincreasing as theta shrinks and infinite theta is unconstrained") {
  SlenderConfig cfg;
  cfg.n = 32;
  cfg.ell = 2;
  cfg.thetas = {2.0, 1.0, 0.5, 0.25};
  const auto ref = straight_reference(cfg.n);
  for (std::uint64_t r = 0; r < 4; ++r) {
    const auto f = NoiseField::generate(cfg.n + 1, -8.0, cfg.n + 8.0, 0.05, 12, r);
    const auto rep = slender_shortfall(f, ref, cfg);
    REQUIRE(rep.regular);
    CHECK(rep.endpoint_pairs > 0);
    double prev = rep.unconstrained_sup;
    for (const auto& s : rep.sup) {
      if (!s) continue;
      CHECK(*s <= prev + 1e-12);
      prev = *s;
    }

    cfg.thetas = {std::numeric_limits<double>::infinity()};
    const auto inf = slender_shortfall(f, ref, cfg);
    REQUIRE(inf.sup[0].has_value());
    CHECK(*inf.sup[0] == rep.unconstrained_sup);
    cfg.thetas = {2.0, 1.0, 0.5, 0.25};
  }
}

TEST_CASE("constrained weight agrees with exhaustive tube search") {
  const int n = 4;
  const auto f = oracle::random_field(n + 1, 9, 40, 0.5);
  const auto ref = straight_reference(n);
  for (double theta : {0.3, 0.6, 1.2}) {
    for (double chi : {0.0, 0.25, 0.5}) {
      const CompatibleTriple triple(n, 0.0, 1.0);
      const auto got = constrained_max_weight(f, n, {0.0, 0.0}, {0.0, 1.0}, ref, theta, chi);
      const double half = theta;  // s12 = 1
      const Tube tube = make_tube(f, ref, 0, n, half);
      const auto best = oracle::brute_max(f, 0, 8, 0, n, oracle::tube_filter(tube, 8, 0, n, violation_budget(chi, n + 1)));
      if (best.jumps.empty()) {
        CHECK_FALSE(got.has_value());
      } else {
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(weight_from_energy(n, best.value, {0.0, 0}, {4.0, n})).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("slender hypothesis flag") {
  CHECK(slender_hypothesis_holds(1 << 20, 0, 1.0));
  CHECK_FALSE(slender_hypothesis_holds(64, 2, 0.5));
}
