#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kpzlab/rng.hpp"
#include "kpzlab/routed_profile.hpp"

namespace kpzlab {

/// Brownian bridge on [0, s] from 0 to y, sampled at i * step.
struct BridgeSample {
  double s = 0.0;
  double y = 0.0;
  double step = 0.0;
  std::vector<double> values;

  [[nodiscard]] double time_at(std::size_t i) const noexcept { return step * static_cast<double>(i); }
};

struct BridgeSpec {
  double s = 6.0;
  double y = -1.0;
  double step = 0.01;
  std::size_t retry_cap = 1'000'000;
};

enum class BridgeMethod { rejection, resampler, resampler_free };

struct SamplerDiagnostics {
  std::size_t proposals = 0;
  std::size_t accepted = 0;

  [[nodiscard]] double acceptance_rate() const noexcept {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
  void merge(const SamplerDiagnostics& o) noexcept {
    proposals += o.proposals;
    accepted += o.accepted;
  }
};

/// Unconditioned bridge, generated left to right.
BridgeSample sample_bridge(const BridgeSpec& spec, CounterEngine& eng);

/// Bridge conditioned to stay negative at every interior grid time. Sample
/// `index` of the stream `seed`; rejection draws whole bridges (abandoning a draw
/// at its first nonnegative value), the resampler redraws the relative midpoint
/// on [1, 5] of a rejection draw and accepts when the result stays negative.
/// resampler_free applies the same redraw to an unconditioned bridge that is
/// negative off (1, 5). Diagnostics count proposals of the selected method.
BridgeSample sample_conditioned_bridge(const BridgeSpec& spec, std::uint64_t seed, std::uint64_t index,
                                       BridgeMethod method, SamplerDiagnostics* diagnostics = nullptr);

/// 4^{-1} mu(1, inf) e^{-2}: the guaranteed resampler acceptance probability.
double resampler_acceptance_bound();

struct NearTouchResult {
  std::vector<ProportionEstimate> table;  ///< per eps
  SamplerDiagnostics diagnostics;
};

/// Frequency of sup_{[r, 2r]} X >= -r^{1/2} eps for conditioned bridges.
NearTouchResult near_touch_prob(const BridgeSpec& spec, double r, std::span<const double> eps, std::uint64_t seed,
                                std::size_t replicas, BridgeMethod method = BridgeMethod::rejection);

struct TwinPeaksReferenceSpec {
  double K = 0.0;
  double r = 3.0;
  double eps = 0.1;
  double step = 1e-3;
};

struct TwinPeaksReferenceResult {
  std::vector<ProportionEstimate> table;  ///< per sigma, frequency of NT and Mid
  ProportionEstimate mid;                 ///< frequency of Mid alone
};

/// W = B + K x on [-r, r] for two-sided Brownian motion B with B(0) = 0.
/// Mid: argmax M in [-r/3, r/3]. NT: some z with |z - M| in [eps, 2 eps] has
/// W(z) >= W(M) - sigma eps^{1/2}.
TwinPeaksReferenceResult twin_peaks_reference(const TwinPeaksReferenceSpec& spec, std::span<const double> sigmas,
                                              std::uint64_t seed, std::size_t replicas);

}  // namespace kpzlab
