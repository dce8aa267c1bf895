#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "kpzlab/stats.hpp"

namespace kpzlab {

/// m x m GUE: real diagonal N(0, s), complex off-diagonal entries with E|h|^2 = s.
struct GueSpec {
  int m = 1;
  double entry_variance = 1.0;
  std::uint64_t seed = 0;
};

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm-sequence bisection.
double tridiagonal_lambda_max(const std::vector<double>& diag, const std::vector<double>& offdiag);

/// Top eigenvalues of `count` independent GUE draws via the beta = 2 tridiagonal
/// model. Draw j uses the stream (seed, first_index + j), and the entry variance is
/// applied as a final multiplication by sqrt(s).
std::vector<double> sample_lambda_max(const GueSpec& spec, std::size_t count, std::uint64_t first_index = 0);

/// One dense Hermitian draw (index selects the stream).
Eigen::MatrixXcd sample_gue_matrix(const GueSpec& spec, std::uint64_t index);

/// Top eigenvalues from dense matrices and a full Hermitian eigensolver; for small m.
std::vector<double> sample_lambda_max_dense(const GueSpec& spec, std::size_t count, std::uint64_t first_index = 0);

/// Samples of M[(0,0) -> (m1, m2)] on fields of step `step`, one field per replica.
std::vector<double> lpp_energy_samples(int m1, int m2, double step, std::uint64_t seed, std::size_t count,
                                       std::uint64_t first_replica = 0);

struct LppGueComparison {
  KsResult ks;
  std::vector<double> lpp;
  std::vector<double> gue;  ///< sqrt(m1) G_{m2+1}(1)
};

/// Two-sample KS between LPP energies and the matching scaled GUE eigenvalues.
/// Refuses fewer than 200 samples per side.
LppGueComparison lpp_gue_ks(std::vector<double> lpp_samples, int m1, int m2, std::uint64_t gue_seed,
                            std::size_t gue_count);

/// n^{-1/3} 2^{-1/2} (sqrt(n) G_{n+1}(1) - 2n): the law of Wgt_n[(0,0) -> (0,1)].
std::vector<double> gue_weight_samples(int n, std::uint64_t seed, std::size_t count);

}  // namespace kpzlab
