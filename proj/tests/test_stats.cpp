#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kpzlab/rng.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;

namespace {

std::vector<double> gaussians(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  CounterEngine eng({seed, 0, 0});
  std::vector<double> v(n);
  for (auto& x : v) x = eng.gaussian() + shift;
  return v;
}

}  // namespace

TEST_CASE("two-sample KS identities") {
  const auto a = gaussians(1, 100);
  CHECK(ks_two_sample(a, a).distance == 0.0);
  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
  std::vector<double> lo(50), hi(60);
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = 100.0 + static_cast<double>(i);
  CHECK(ks_two_sample(lo, hi).distance == 1.0);
  CHECK(ks_two_sample(lo, hi).p_value < 1e-10);
  std::vector<double> small(19, 0.0);
  CHECK_THROWS_AS(ks_two_sample(small, a), DomainError);
}

TEST_CASE("two-sample KS calibration") {
  // Critical value at level 0.01: c(0.01) sqrt((n+m)/(n m)), c = 1.628.
  int below = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto v = gaussians(1000 + t, 400);
    std::span<const double> s(v);
    const double d = ks_two_sample(s.first(200), s.last(200)).distance;
    if (d < 1.628 * std::sqrt(2.0 / 200.0)) ++below;
  }
  CHECK(below >= 95);
  const auto shifted = ks_two_sample(gaussians(5, 2000), gaussians(6, 2000, 0.3));
  CHECK(shifted.p_value < 1e-6);
}

TEST_CASE("one-sample KS") {
  const auto v = gaussians(9, 5000);
  const auto r = ks_one_sample(v, normal_cdf);
  CHECK(r.distance < 0.03);
  CHECK(r.p_value > 0.001);
  const auto bad = ks_one_sample(v, [](double x) { return normal_cdf(x / 2.0); });
  CHECK(bad.distance > 0.1);
}

TEST_CASE("kolmogorov survival") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_survival(1.628) == doctest::Approx(0.0100).epsilon(0.01));
  CHECK(kolmogorov_survival(3.0) < 1e-6);
}

TEST_CASE("Wilson intervals") {
  const auto [lo0, hi0] = proportion_ci(0, 40);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  const auto [lo1, hi1] = proportion_ci(40, 40);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);
  // Closed form at p = 1/2, n = 100, z = 1.959964: centre 0.5, half width
  // z sqrt(0.0025 + z^2/40000) / (1 + z^2/100).
  const double z = 1.959963984540054;
  const double half = z * std::sqrt(0.0025 + z * z / 40000.0) / (1.0 + z * z / 100.0);
  const auto [lo, hi] = proportion_ci(50, 100, 0.95);
  CHECK(lo == doctest::Approx(0.5 - half).epsilon(1e-12));
  CHECK(hi == doctest::Approx(0.5 + half).epsilon(1e-12));
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK_THROWS_AS(proportion_ci(5, 4), DomainError);
  CHECK_THROWS_AS(proportion_ci(0, 0), DomainError);
}

TEST_CASE("normal quantile and cdf") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("exponent fit") {
  const std::vector<double> scales{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> exact;
  for (double s : scales) exact.push_back(3.0 * std::pow(s, 2.0 / 3.0));
  const auto f = exponent_fit(scales, exact);
  CHECK(std::abs(f.slope - 2.0 / 3.0) < 1e-6);
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.residual < 1e-12);
  const std::vector<double> flat(5, 2.5);
  CHECK(std::abs(exponent_fit(scales, flat).slope) < 1e-12);
  // Noisy power law: recovery within three standard errors.
  CounterEngine eng({3, 0, 0});
  std::vector<double> noisy_s;
  std::vector<double> noisy_v;
  for (int i = 0; i < 40; ++i) {
    const double s = std::pow(2.0, 0.25 * i);
    noisy_s.push_back(s);
    noisy_v.push_back(std::pow(s, 0.4) * std::exp(0.1 * eng.gaussian()));
  }
  const auto nf = exponent_fit(noisy_s, noisy_v);
  CHECK(std::abs(nf.slope - 0.4) < 3.0 * nf.slope_se);
  CHECK_THROWS_AS(exponent_fit(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(exponent_fit(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0, -2.0, 3.0}),
                  DomainError);
}

TEST_CASE("mean and median estimates") {
  const auto v = gaussians(12, 10000, 1.0);
  const auto m = mean_estimate(v);
  CHECK(m.ci_lo < 1.0);
  CHECK(m.ci_hi > 1.0);
  CHECK(m.sd == doctest::Approx(1.0).epsilon(0.05));
  const auto med = median_estimate(v);
  CHECK(med.ci_lo <= med.median);
  CHECK(med.median <= med.ci_hi);
  CHECK(std::abs(med.median - 1.0) < 0.05);
  CHECK(median_estimate(std::vector<double>{3.0, 1.0, 2.0}).median == 2.0);
  CHECK(median_estimate(std::vector<double>{4.0, 1.0, 2.0, 3.0}).median == 2.5);
}

TEST_CASE("shuffled merges give identical reductions") {
  std::vector<std::pair<std::uint64_t, double>> items;
  const auto v = gaussians(77, 500);
  for (std::size_t i = 0; i < v.size(); ++i) items.emplace_back(i, v[i]);
  auto reduce = [&](std::uint64_t shuffle_seed, std::size_t parts) {
    auto copy = items;
    std::mt19937_64 rng(shuffle_seed);
    std::shuffle(copy.begin(), copy.end(), rng);
    std::vector<ReplicaSamples> partial(parts);
    std::vector<ProportionCounter> counts(parts);
    for (std::size_t i = 0; i < copy.size(); ++i) {
      partial[i % parts].add(copy[i].first, copy[i].second);
      counts[i % parts].add(copy[i].second > 0.0);
    }
    ReplicaSamples all;
    ProportionCounter total;
    for (std::size_t p = parts; p-- > 0;) {
      all.merge(partial[p]);
      total.merge(counts[p]);
    }
    const auto values = all.values();
    return std::make_tuple(values, mean_estimate(values).mean, total.successes);
  };
  const auto a = reduce(1, 3);
  const auto b = reduce(2, 7);
  CHECK(std::get<0>(a) == std::get<0>(b));
  CHECK(std::get<1>(a) == std::get<1>(b));
  CHECK(std::get<2>(a) == std::get<2>(b));
}
