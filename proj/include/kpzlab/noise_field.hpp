#pragma once

#include <Eigen/Core>

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "kpzlab/error.hpp"

namespace kpzlab {

using Index = Eigen::Index;

/// Limits applied when sizing a field. The default allows roughly 3 GB of samples.
struct FieldLimits {
  Index max_grid_points = 100'000'000;
  Index max_total_samples = 400'000'000;
};

/// Discretized independent Brownian lines B(., k), k = 0..level_count-1, sampled
/// on the grid x_min + i * step. Every line is anchored at B(x_min, k) = 0.
///
/// Increments are drawn from a Philox stream keyed by (master_seed,
/// replica_index); the counter addresses (increment pair, level), so the field
/// is a pure function of its parameters and levels can be filled in any order.
class NoiseField {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// Grid points within this many steps of a sample snap to it, absorbing
  /// round-off in coordinates computed through the scaling map.
  static constexpr double kSnapSlack = 1e-7;

  NoiseField() = default;

  static NoiseField generate(int level_count, double x_min, double x_max, double step, std::uint64_t master_seed,
                             std::uint64_t replica_index, const FieldLimits& limits = {});

  /// Field with explicit samples, for tests and replay. Row k is level k.
  static NoiseField from_samples(Matrix samples, double x_min, double step, std::uint64_t master_seed = 0,
                                 std::uint64_t replica_index = 0);

  [[nodiscard]] int level_count() const noexcept { return static_cast<int>(samples_.rows()); }
  [[nodiscard]] Index grid_size() const noexcept { return samples_.cols(); }
  [[nodiscard]] double x_min() const noexcept { return x_min_; }
  [[nodiscard]] double x_max() const noexcept { return x_min_ + step_ * static_cast<double>(grid_size() - 1); }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
  [[nodiscard]] std::uint64_t replica_index() const noexcept { return replica_index_; }
  [[nodiscard]] const Matrix& samples() const noexcept { return samples_; }

  double operator()(int level, Index i) const noexcept { return samples_(level, i); }

  [[nodiscard]] double x_at(Index i) const noexcept { return x_min_ + step_ * static_cast<double>(i); }

  /// Grid index at or below x. Throws DomainError when x lies outside the extent.
  [[nodiscard]] Index snap(double x) const;
  /// True when x is a grid point up to kSnapSlack.
  [[nodiscard]] bool on_grid(double x) const noexcept;
  /// Index of grid point x; throws DomainError when x is off grid.
  [[nodiscard]] Index grid_index(double x) const;

  /// B(x, k) with x snapped down to the grid.
  [[nodiscard]] double value_at(double x, int level) const;

  /// The same Brownian paths observed on every stride-th grid point.
  [[nodiscard]] NoiseField subsample(Index stride) const;

  /// Versioned binary dump: magic "KPZF", version, header, row-major float64 payload.
  void write_binary(std::ostream& out) const;
  static NoiseField read_binary(std::istream& in);

 private:
  Matrix samples_;
  double x_min_ = 0.0;
  double step_ = 1.0;
  std::uint64_t master_seed_ = 0;
  std::uint64_t replica_index_ = 0;
};

/// Read-only access pattern shared by NoiseField and its views; the DP sweeps
/// are written against this.
template <class F>
concept FieldLike = requires(const F& f, int k, Index i) {
  { f.level_count() } -> std::convertible_to<int>;
  { f.grid_size() } -> std::convertible_to<Index>;
  { f(k, i) } -> std::convertible_to<double>;
};

/// The field reflected through levels and x: level k maps to top - k, index i to
/// right - i, and values are negated. Staircase energies from (u, a) to
/// (right, top) in the original equal energies from (0, 0) to (right - u, top - a)
/// here, which turns backward profiles into forward sweeps.
class ReflectedField {
 public:
  ReflectedField(const NoiseField& field, int top_level, Index right_index);

  [[nodiscard]] int level_count() const noexcept { return top_ + 1; }
  [[nodiscard]] Index grid_size() const noexcept { return right_ + 1; }
  double operator()(int level, Index i) const noexcept { return -(*field_)(top_ - level, right_ - i); }

 private:
  const NoiseField* field_;
  int top_;
  Index right_;
};

}  // namespace kpzlab
