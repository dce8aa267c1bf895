#include "kpzlab/noise_field.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "kpzlab/rng.hpp"

namespace kpzlab {

namespace {

constexpr std::uint64_t kNoiseTag = 0x4e4f495345ULL;  // "NOISE"
constexpr std::array<char, 4> kMagic = {'K', 'P', 'Z', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DomainError("field dump truncated");
  return v;
}

}  // namespace

NoiseField NoiseField::generate(int level_count, double x_min, double x_max, double step, std::uint64_t master_seed,
                                std::uint64_t replica_index, const FieldLimits& limits) {
  if (level_count < 1) throw DomainError("level_count must be at least 1");
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step must be positive");
  if (!(x_max > x_min)) throw DomainError("x_max must exceed x_min");
  const double cells = (x_max - x_min) / step;
  if (!std::isfinite(cells) || cells + 1.0 > static_cast<double>(limits.max_grid_points)) {
    std::ostringstream msg;
    msg << "field extent/step = " << cells << " exceeds the grid cap " << limits.max_grid_points;
    throw SizingError(msg.str());
  }
  const Index grid = static_cast<Index>(std::llround(cells)) + 1;
  if (static_cast<double>(grid) * level_count > static_cast<double>(limits.max_total_samples)) {
    throw SizingError("field sample count exceeds the configured cap");
  }

  NoiseField field;
  field.samples_.resize(level_count, grid);
  field.x_min_ = x_min;
  field.step_ = step;
  field.master_seed_ = master_seed;
  field.replica_index_ = replica_index;

  const auto key = StreamKey{master_seed, replica_index, kNoiseTag}.philox_key();
  const double scale = std::sqrt(step);
  for (int k = 0; k < level_count; ++k) {
    double* row = field.samples_.row(k).data();
    row[0] = 0.0;
    double acc = 0.0;
    for (Index i = 1; i < grid; i += 2) {
      const auto [g0, g1] = gaussian_pair(key, static_cast<std::uint32_t>(i / 2), static_cast<std::uint32_t>(k));
      acc += scale * g0;
      row[i] = acc;
      if (i + 1 < grid) {
        acc += scale * g1;
        row[i + 1] = acc;
      }
    }
  }
  return field;
}

NoiseField NoiseField::from_samples(Matrix samples, double x_min, double step, std::uint64_t master_seed,
                                    std::uint64_t replica_index) {
  if (samples.rows() < 1 || samples.cols() < 1) throw DomainError("empty sample matrix");
  if (!(step > 0.0)) throw DomainError("step must be positive");
  NoiseField field;
  field.samples_ = std::move(samples);
  field.x_min_ = x_min;
  field.step_ = step;
  field.master_seed_ = master_seed;
  field.replica_index_ = replica_index;
  return field;
}

Index NoiseField::snap(double x) const {
  const double pos = (x - x_min_) / step_;
  if (!(pos >= -kSnapSlack) || pos > static_cast<double>(grid_size() - 1) + kSnapSlack) {
    std::ostringstream msg;
    msg << "x = " << x << " outside field extent [" << x_min_ << ", " << x_max() << "]";
    throw DomainError(msg.str());
  }
  const auto i = static_cast<Index>(std::floor(pos + kSnapSlack));
  return std::min(i, grid_size() - 1);
}

bool NoiseField::on_grid(double x) const noexcept {
  const double pos = (x - x_min_) / step_;
  if (!(pos >= -kSnapSlack) || pos > static_cast<double>(grid_size() - 1) + kSnapSlack) return false;
  return std::abs(pos - std::round(pos)) <= kSnapSlack;
}

Index NoiseField::grid_index(double x) const {
  if (!on_grid(x)) {
    std::ostringstream msg;
    msg << "x = " << x << " is not a grid point of the field";
    throw DomainError(msg.str());
  }
  return static_cast<Index>(std::llround((x - x_min_) / step_));
}

double NoiseField::value_at(double x, int level) const {
  if (level < 0 || level >= level_count()) throw DomainError("level out of range");
  return samples_(level, snap(x));
}

NoiseField NoiseField::subsample(Index stride) const {
  if (stride < 1) throw DomainError("stride must be positive");
  const Index coarse = (grid_size() - 1) / stride + 1;
  Matrix out(samples_.rows(), coarse);
  for (Index i = 0; i < coarse; ++i) out.col(i) = samples_.col(i * stride);
  return from_samples(std::move(out), x_min_, step_ * static_cast<double>(stride), master_seed_, replica_index_);
}

void NoiseField::write_binary(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put(out, kFormatVersion);
  put(out, static_cast<std::int32_t>(level_count()));
  put(out, static_cast<std::int64_t>(grid_size()));
  put(out, x_min_);
  put(out, x_max());
  put(out, step_);
  put(out, master_seed_);
  put(out, replica_index_);
  out.write(reinterpret_cast<const char*>(samples_.data()),
            static_cast<std::streamsize>(sizeof(double) * samples_.size()));
}

NoiseField NoiseField::read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw DomainError("not a field dump (bad magic)");
  if (get<std::uint32_t>(in) != kFormatVersion) throw DomainError("unsupported field dump version");
  const auto levels = get<std::int32_t>(in);
  const auto grid = get<std::int64_t>(in);
  const auto x_min = get<double>(in);
  (void)get<double>(in);  // x_max is implied by grid and step
  const auto step = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto replica = get<std::uint64_t>(in);
  if (levels < 1 || grid < 1) throw DomainError("corrupt field dump header");
  Matrix samples(levels, grid);
  in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(sizeof(double) * samples.size()));
  if (!in) throw DomainError("field dump truncated");
  return from_samples(std::move(samples), x_min, step, seed, replica);
}

ReflectedField::ReflectedField(const NoiseField& field, int top_level, Index right_index)
    : field_(&field), top_(top_level), right_(right_index) {
  if (top_level < 0 || top_level >= field.level_count()) throw DomainError("reflection level out of range");
  if (right_index < 0 || right_index >= field.grid_size()) throw DomainError("reflection index out of range");
}

}  // namespace kpzlab
