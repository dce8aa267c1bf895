#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "kpzlab/gue.hpp"
#include "kpzlab/lpp.hpp"
#include "kpzlab/rng.hpp"

using namespace kpzlab;

TEST_CASE("tridiagonal bisection matches a dense eigensolver") {
  CounterEngine eng({5, 0, 1});
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 7;
    std::vector<double> d(static_cast<std::size_t>(m));
    std::vector<double> e(static_cast<std::size_t>(m > 0 ? m - 1 : 0));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      d[static_cast<std::size_t>(i)] = eng.gaussian();
      a(i, i) = d[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i + 1 < m; ++i) {
      e[static_cast<std::size_t>(i)] = eng.gaussian();
      a(i, i + 1) = a(i + 1, i) = e[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    CHECK(tridiagonal_lambda_max(d, e) == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("m = 1 draws are standard normal up to the variance") {
  const auto x = sample_lambda_max({1, 1.0, 3}, 20000);
  const auto est = mean_estimate(x, 0.99);
  CHECK(std::abs(est.mean) < 4.0 * est.se);
  CHECK(sample_variance(x) == doctest::Approx(1.0).epsilon(0.05));
  const auto ks = ks_one_sample(x, normal_cdf);
  CHECK(ks.distance < 0.015);
}

TEST_CASE("entry variance is a final rescale of the same draws") {
  const auto unit = sample_lambda_max({8, 1.0, 11}, 50, 4);
  const auto scaled = sample_lambda_max({8, 4.0, 11}, 50, 4);
  for (std::size_t j = 0; j < unit.size(); ++j) CHECK(scaled[j] == 2.0 * unit[j]);
}

TEST_CASE("first_index addresses draws independently of batching") {
  const auto all = sample_lambda_max({5, 1.0, 21}, 30, 0);
  const auto tail = sample_lambda_max({5, 1.0, 21}, 10, 20);
  for (std::size_t j = 0; j < tail.size(); ++j) CHECK(tail[j] == all[20 + j]);
}

TEST_CASE("dense draws are Hermitian with real diagonal") {
  const auto h = sample_gue_matrix({6, 2.0, 9}, 3);
  CHECK((h - h.adjoint()).norm() == 0.0);
  for (int i = 0; i < 6; ++i) CHECK(h(i, i).imag() == 0.0);
}

TEST_CASE("tridiagonal model and dense GUE share the top eigenvalue law") {
  const GueSpec spec{6, 1.0, 17};
  const auto tri = sample_lambda_max(spec, 5000);
  const auto dense = sample_lambda_max_dense({6, 1.0, 18}, 5000);
  const auto ks = ks_two_sample(tri, dense);
  CHECK(ks.distance <= 0.03);
}

TEST_CASE("edge scaling: lambda_max / sqrt(m) approaches 2 from below") {
  const auto x = sample_lambda_max({50, 1.0, 2}, 400);
  const double ratio = mean_estimate(x).mean / std::sqrt(50.0);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.0);
}

TEST_CASE("one level of LPP is the Brownian endpoint") {
  // M[(0,0) -> (m1, 0)] = B(m1, 0) ~ N(0, m1), and sqrt(m1) G_1(1) has the same law.
  const auto lpp = lpp_energy_samples(4, 0, 0.5, 3, 800);
  const auto cmp = lpp_gue_ks(lpp, 4, 0, 99, 800);
  CHECK(cmp.ks.p_value > 0.001);
  CHECK(sample_variance(lpp) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("GUE comparison refuses underpowered inputs") {
  const auto lpp = lpp_energy_samples(1, 1, 0.1, 3, 50);
  CHECK_THROWS_AS(lpp_gue_ks(lpp, 1, 1, 1, 500), DomainError);
  CHECK_THROWS_AS(lpp_gue_ks(std::vector<double>(300, 0.0), 1, 1, 1, 100), DomainError);
}

TEST_CASE("GUE weight law has a negative mean") {
  const auto w = gue_weight_samples(100, 5, 2000);
  const auto est = mean_estimate(w, 0.99);
  CHECK(est.ci_hi < 0.0);
}
