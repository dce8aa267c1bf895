#include "kpzlab/gue.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "kpzlab/lpp.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

namespace {

constexpr std::uint64_t kGueTag = 0x475545ULL;

void check_spec(const GueSpec& spec) {
  if (spec.m < 1) throw DomainError("GUE dimension must be at least 1");
  if (!(spec.entry_variance > 0.0)) throw DomainError("GUE entry variance must be positive");
}

double chi(CounterEngine& eng, int dof) {
  double s = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double g = eng.gaussian();
    s += g * g;
  }
  return std::sqrt(s);
}

/// Number of eigenvalues strictly below x.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x) {
  int count = 0;
  double q = d[0] - x;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (q == 0.0) q = std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0);
    q = d[i] - x - e2[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

double tridiagonal_lambda_max(const std::vector<double>& diag, const std::vector<double>& offdiag) {
  const std::size_t m = diag.size();
  if (m == 0 || offdiag.size() + 1 != m) throw DomainError("tridiagonal shape mismatch");
  if (m == 1) return diag[0];
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) + (i + 1 < m ? std::abs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  std::vector<double> e2(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) e2[i] = offdiag[i] * offdiag[i];
  const int target = static_cast<int>(m) - 1;
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, e2, mid) > target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> sample_lambda_max(const GueSpec& spec, std::size_t count, std::uint64_t first_index) {
  check_spec(spec);
  const auto m = static_cast<std::size_t>(spec.m);
  const double scale = std::sqrt(spec.entry_variance);
  std::vector<double> out;
  out.reserve(count);
  std::vector<double> d(m);
  std::vector<double> e(m - 1);
  for (std::size_t j = 0; j < count; ++j) {
    CounterEngine eng({spec.seed, first_index + j, kGueTag});
    for (std::size_t i = 0; i < m; ++i) d[i] = eng.gaussian();
    for (std::size_t i = 0; i + 1 < m; ++i) e[i] = chi(eng, 2 * static_cast<int>(m - 1 - i)) / std::numbers::sqrt2;
    out.push_back(scale * tridiagonal_lambda_max(d, e));
  }
  return out;
}

Eigen::MatrixXcd sample_gue_matrix(const GueSpec& spec, std::uint64_t index) {
  check_spec(spec);
  CounterEngine eng({spec.seed, index, kGueTag + 1});
  const double sd = std::sqrt(spec.entry_variance);
  const double half = std::sqrt(0.5 * spec.entry_variance);
  Eigen::MatrixXcd h(spec.m, spec.m);
  for (int i = 0; i < spec.m; ++i) {
    h(i, i) = sd * eng.gaussian();
    for (int j = i + 1; j < spec.m; ++j) {
      const double re = half * eng.gaussian();
      const double im = half * eng.gaussian();
      h(i, j) = {re, im};
      h(j, i) = {re, -im};
    }
  }
  return h;
}

std::vector<double> sample_lambda_max_dense(const GueSpec& spec, std::size_t count, std::uint64_t first_index) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto h = sample_gue_matrix(spec, first_index + j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "Hermitian eigensolver failed on\n" << h;
      throw ComputeError(msg.str());
    }
    out.push_back(solver.eigenvalues().maxCoeff());
  }
  return out;
}

std::vector<double> lpp_energy_samples(int m1, int m2, double step, std::uint64_t seed, std::size_t count,
                                       std::uint64_t first_replica) {
  if (m1 < 1 || m2 < 0) throw DomainError("need m1 >= 1 and m2 >= 0");
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto field = NoiseField::generate(m2 + 1, 0.0, static_cast<double>(m1), step, seed, first_replica + j);
    const auto f = detail::sweep(field, 0, field.grid_size() - 1, 0, m2);
    out.push_back(f.back());
  }
  return out;
}

LppGueComparison lpp_gue_ks(std::vector<double> lpp_samples, int m1, int m2, std::uint64_t gue_seed,
                            std::size_t gue_count) {
  if (lpp_samples.size() < 200 || gue_count < 200) throw DomainError("LPP/GUE comparison needs at least 200 samples");
  LppGueComparison c;
  c.lpp = std::move(lpp_samples);
  c.gue = sample_lambda_max({m2 + 1, static_cast<double>(m1), gue_seed}, gue_count);
  c.ks = ks_two_sample(c.lpp, c.gue);
  return c;
}

std::vector<double> gue_weight_samples(int n, std::uint64_t seed, std::size_t count) {
  if (n < 1) throw DomainError("n must be positive");
  auto g = sample_lambda_max({n + 1, 1.0, seed}, count);
  const double root = std::sqrt(static_cast<double>(n));
  const double scale = 1.0 / (std::cbrt(static_cast<double>(n)) * std::numbers::sqrt2);
  for (auto& v : g) v = scale * (root * v - 2.0 * n);
  return g;
}

}  // namespace kpzlab
