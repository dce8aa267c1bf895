#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace kpzlab {

/// SplitMix64 finalizer, used to derive Philox keys from (seed, replica, tag).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: a 128-bit counter and 64-bit key map to 128 random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Key for one independent stream. Streams are addressed by
/// (master_seed, replica_index, tag); the tag separates uses inside a replica
/// (noise levels, bridge samples, GUE draws, ...).
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t tag = 0;

  [[nodiscard]] Philox4x32::Key philox_key() const noexcept {
    const std::uint64_t k = mix64(mix64(mix64(master_seed) ^ replica) ^ (tag * 0x632be59bd9b4e019ULL));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }
};

/// Uniform in (0, 1] from 53 random bits.
inline double unit_open_closed(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform in [0, 1) from 53 random bits.
inline double unit_closed_open(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Two standard Gaussians from one Philox block (Box-Muller). Pure function of
/// (key, c0, c1): the building block of reproducible field generation.
inline std::pair<double, double> gaussian_pair(Philox4x32::Key key, std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2 = 0) noexcept {
  const auto r = Philox4x32::apply({c0, c1, c2, 0u}, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  const double radius = std::sqrt(-2.0 * std::log(unit_open_closed(a)));
  const double angle = 2.0 * std::numbers::pi * unit_closed_open(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Sequential view of one Philox stream, usable with <random> distributions.
/// Copyable; two engines with the same key and position produce the same output.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine() = default;
  explicit CounterEngine(StreamKey key, std::uint64_t substream = 0) noexcept
      : key_(key.philox_key()), substream_(substream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (cached_ == 0) {
      const auto r = Philox4x32::apply({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                        static_cast<std::uint32_t>(substream_),
                                        static_cast<std::uint32_t>(substream_ >> 32)},
                                       key_);
      ++counter_;
      buffer_[0] = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
      buffer_[1] = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
      cached_ = 2;
    }
    return buffer_[--cached_];
  }

  double uniform() noexcept { return unit_closed_open((*this)()); }

  /// Standard Gaussian (Box-Muller, second variate cached).
  double gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(unit_open_closed((*this)())));
    const double angle = 2.0 * std::numbers::pi * unit_closed_open((*this)());
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  Philox4x32::Key key_{};
  std::uint64_t substream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cached_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kpzlab
