#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kpzlab/brownian.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;

TEST_CASE("bridge endpoints are pinned exactly") {
  CounterEngine eng({1, 0, 0});
  const BridgeSpec spec{6.0, -1.5, 0.01};
  for (int j = 0; j < 10; ++j) {
    const auto b = sample_bridge(spec, eng);
    REQUIRE(b.values.size() == 601);
    CHECK(b.values.front() == 0.0);
    CHECK(b.values.back() == -1.5);
    CHECK(b.time_at(600) == doctest::Approx(6.0));
  }
}

TEST_CASE("bridge covariance is t (s - u) / s") {
  const BridgeSpec spec{6.0, 0.0, 0.05};
  CounterEngine eng({2, 0, 0});
  const std::size_t reps = 20000;
  const std::vector<std::pair<double, double>> probes{{1.0, 2.0}, {2.0, 4.5}, {3.0, 3.0}};
  std::vector<std::vector<double>> prod(probes.size());
  for (std::size_t j = 0; j < reps; ++j) {
    const auto b = sample_bridge(spec, eng);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto i = static_cast<std::size_t>(std::llround(probes[p].first / spec.step));
      const auto k = static_cast<std::size_t>(std::llround(probes[p].second / spec.step));
      prod[p].push_back(b.values[i] * b.values[k]);
    }
  }
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto [t, u] = probes[p];
    const auto est = mean_estimate(prod[p]);
    CHECK(std::abs(est.mean - t * (6.0 - u) / 6.0) <= 4.0 * est.se);
  }
}

TEST_CASE("conditioned samples stay negative for every method") {
  const BridgeSpec spec{6.0, -1.0, 0.01};
  for (auto method : {BridgeMethod::rejection, BridgeMethod::resampler, BridgeMethod::resampler_free}) {
    for (std::uint64_t j = 0; j < 20; ++j) {
      const auto b = sample_conditioned_bridge(spec, 3, j, method);
      CHECK(b.values.front() == 0.0);
      CHECK(b.values.back() == -1.0);
      CHECK(*std::max_element(b.values.begin() + 1, b.values.end() - 1) < 0.0);
    }
  }
}

TEST_CASE("conditioned sampling is a pure function of (seed, index)") {
  const BridgeSpec spec;
  const auto a = sample_conditioned_bridge(spec, 9, 4, BridgeMethod::resampler);
  const auto b = sample_conditioned_bridge(spec, 9, 4, BridgeMethod::resampler);
  CHECK(a.values == b.values);
}

TEST_CASE("sampler preconditions and stall diagnostics") {
  CHECK_THROWS_AS(sample_conditioned_bridge({5.0, -1.0, 0.01}, 1, 0, BridgeMethod::rejection), DomainError);
  CHECK_THROWS_AS(sample_conditioned_bridge({6.0, 0.5, 0.01}, 1, 0, BridgeMethod::rejection), DomainError);
  CHECK_THROWS_AS(sample_conditioned_bridge({6.0, -1.0, 0.02}, 1, 0, BridgeMethod::rejection), DomainError);
  BridgeSpec tight{6.0, 0.0, 0.01, 3};
  CHECK_THROWS_AS(sample_conditioned_bridge(tight, 1, 0, BridgeMethod::rejection), ComputeError);
}

TEST_CASE("Gaussian interval mass is at most the density bound times the length") {
  const double bound = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const std::vector<std::pair<double, double>> probes{{-3.0, 0.1}, {-1.0, 0.5}, {-0.2, 0.4}, {0.0, 1.0}, {0.3, 0.01},
                                                      {1.0, 2.0},  {2.5, 0.3}, {-5.0, 10.0}, {4.0, 0.5}, {-0.05, 0.1}};
  for (auto [x, a] : probes) {
    CHECK(normal_cdf(x + a) - normal_cdf(x) <= bound * a + 1e-15);
  }
}

TEST_CASE("resampler acceptance bound value") {
  CHECK(resampler_acceptance_bound() == doctest::Approx(0.25 * 0.158655253931457 * std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("near touch frequency is nondecreasing in eps") {
  const BridgeSpec spec;
  const std::vector<double> eps{0.0, 0.01, 0.05, 0.2, 1.0};
  const auto res = near_touch_prob(spec, 2.0, eps, 5, 1500);
  CHECK(res.table.front().p == 0.0);
  for (std::size_t e = 1; e < eps.size(); ++e) CHECK(res.table[e].p >= res.table[e - 1].p);
  CHECK(res.diagnostics.accepted == 1500);
  CHECK(res.diagnostics.acceptance_rate() > 0.0);
}

TEST_CASE("drifted Brownian twin peaks reference") {
  const std::vector<double> sigmas{0.1, 0.2, 0.4, 0.8};
  const auto res = twin_peaks_reference({0.0, 3.0, 0.1, 1e-3}, sigmas, 6, 4000);
  const double arcsine = 2.0 / std::numbers::pi * (std::asin(std::sqrt(2.0 / 3.0)) - std::asin(std::sqrt(1.0 / 3.0)));
  CHECK(std::abs(res.mid.p - arcsine) < 4.0 * std::sqrt(arcsine * (1.0 - arcsine) / 4000.0));
  for (std::size_t s = 1; s < sigmas.size(); ++s) CHECK(res.table[s].p >= res.table[s - 1].p);
  for (const auto& row : res.table) CHECK(row.p <= res.mid.p);
  CHECK_THROWS_AS(twin_peaks_reference({0.0, 3.0, 0.6, 1e-3}, sigmas, 6, 10), DomainError);
}
