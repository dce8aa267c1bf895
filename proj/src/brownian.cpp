#include "kpzlab/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kpzlab/stats.hpp"

namespace kpzlab {

namespace {

constexpr std::uint64_t kBridgeTag = 0x4252494447ULL;
constexpr std::uint64_t kTwinTag = 0x5457494eULL;

std::size_t grid_count(double length, double step, const char* what) {
  const double q = length / step;
  const auto c = std::llround(q);
  if (c < 1 || std::abs(q - static_cast<double>(c)) > 1e-9 * std::max(1.0, q)) {
    std::ostringstream msg;
    msg << what << " = " << length << " is not a multiple of the step " << step;
    throw DomainError(msg.str());
  }
  return static_cast<std::size_t>(c);
}

void check_spec(const BridgeSpec& spec) {
  if (!(spec.s >= 6.0)) throw DomainError("conditioned bridge needs s >= 6");
  if (!(spec.y <= 0.0)) throw DomainError("conditioned bridge needs y <= 0");
  if (!(spec.step > 0.0 && spec.step <= 0.01 + 1e-15)) throw DomainError("bridge step must lie in (0, 0.01]");
  if (spec.retry_cap < 1) throw DomainError("retry cap must be positive");
  (void)grid_count(spec.s, spec.step, "s");
  (void)grid_count(1.0, spec.step, "1");
}

/// Fills values left to right; stops early (returning false) at the first
/// nonnegative interior value outside (free_lo, free_hi) when `negative` is set.
bool fill_bridge(const BridgeSpec& spec, CounterEngine& eng, std::vector<double>& v, bool negative,
                 std::size_t free_lo = 0, std::size_t free_hi = 0) {
  const std::size_t count = grid_count(spec.s, spec.step, "s");
  v.assign(count + 1, 0.0);
  double x = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double remaining = spec.s - spec.step * static_cast<double>(i);
    const double mean = x + (spec.y - x) * spec.step / remaining;
    const double var = spec.step * (remaining - spec.step) / remaining;
    x = mean + std::sqrt(var) * eng.gaussian();
    v[i + 1] = x;
    if (negative && x >= 0.0 && (i + 1 <= free_lo || i + 1 >= free_hi)) return false;
  }
  v[count] = spec.y;
  return true;
}

void stall(const SamplerDiagnostics& d, const char* method) {
  std::ostringstream msg;
  msg << method << " sampler exceeded its retry cap after " << d.proposals << " proposals (acceptance rate "
      << d.acceptance_rate() << ")";
  throw ComputeError(msg.str());
}

std::vector<double> rejection_draw(const BridgeSpec& spec, CounterEngine& eng, SamplerDiagnostics* diag) {
  std::vector<double> v;
  SamplerDiagnostics local;
  while (local.proposals < spec.retry_cap) {
    ++local.proposals;
    if (fill_bridge(spec, eng, v, true)) {
      ++local.accepted;
      if (diag != nullptr) diag->merge(local);
      return v;
    }
  }
  stall(local, "rejection");
  return v;
}

}  // namespace

BridgeSample sample_bridge(const BridgeSpec& spec, CounterEngine& eng) {
  if (!(spec.s > 0.0) || !(spec.step > 0.0)) throw DomainError("bridge needs positive length and step");
  BridgeSample b{spec.s, spec.y, spec.step, {}};
  fill_bridge(spec, eng, b.values, false);
  return b;
}

BridgeSample sample_conditioned_bridge(const BridgeSpec& spec, std::uint64_t seed, std::uint64_t index,
                                       BridgeMethod method, SamplerDiagnostics* diagnostics) {
  check_spec(spec);
  CounterEngine eng({seed, index, kBridgeTag});
  BridgeSample out{spec.s, spec.y, spec.step, {}};
  if (method == BridgeMethod::rejection) {
    out.values = rejection_draw(spec, eng, diagnostics);
    return out;
  }
  const std::size_t i1 = grid_count(1.0, spec.step, "1");
  const std::size_t i3 = 3 * i1;
  const std::size_t i5 = 5 * i1;
  SamplerDiagnostics local;
  std::vector<double> x;
  while (local.proposals < spec.retry_cap) {
    ++local.proposals;
    if (method == BridgeMethod::resampler) {
      x = rejection_draw(spec, eng, nullptr);
    } else if (!fill_bridge(spec, eng, x, true, i1, i5)) {
      continue;
    }
    const double mid = x[i3] - 0.5 * (x[i1] + x[i5]);
    const double shift = eng.gaussian() - mid;
    bool negative = true;
    for (std::size_t i = i1 + 1; i < i5; ++i) {
      const double tent = 1.0 - std::abs(static_cast<double>(i) - static_cast<double>(i3)) / static_cast<double>(2 * i1);
      x[i] += shift * tent;
      if (x[i] >= 0.0) {
        negative = false;
        break;
      }
    }
    if (negative) {
      ++local.accepted;
      if (diagnostics != nullptr) diagnostics->merge(local);
      out.values = std::move(x);
      return out;
    }
  }
  stall(local, method == BridgeMethod::resampler ? "resampler" : "free resampler");
  return out;
}

double resampler_acceptance_bound() { return 0.25 * (1.0 - normal_cdf(1.0)) * std::exp(-2.0); }

NearTouchResult near_touch_prob(const BridgeSpec& spec, double r, std::span<const double> eps, std::uint64_t seed,
                                std::size_t replicas, BridgeMethod method) {
  check_spec(spec);
  if (!(r > 0.0) || spec.s < 3.0 * r) throw DomainError("near touch needs r > 0 and s >= 3 r");
  if (replicas == 0) throw DomainError("near touch needs replicas");
  const std::size_t lo = static_cast<std::size_t>(std::ceil(r / spec.step - 1e-9));
  const std::size_t hi = static_cast<std::size_t>(std::floor(2.0 * r / spec.step + 1e-9));
  std::vector<ProportionCounter> counts(eps.size());
  NearTouchResult res;
  for (std::size_t j = 0; j < replicas; ++j) {
    const auto b = sample_conditioned_bridge(spec, seed, j, method, &res.diagnostics);
    const double sup = *std::max_element(b.values.begin() + static_cast<std::ptrdiff_t>(lo),
                                         b.values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    for (std::size_t e = 0; e < eps.size(); ++e) counts[e].add(sup >= -std::sqrt(r) * eps[e]);
  }
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const auto [l, h] = proportion_ci(counts[e].successes, counts[e].trials);
    res.table.push_back({eps[e], counts[e].successes, counts[e].trials,
                         static_cast<double>(counts[e].successes) / static_cast<double>(counts[e].trials), l, h});
  }
  return res;
}

TwinPeaksReferenceResult twin_peaks_reference(const TwinPeaksReferenceSpec& spec, std::span<const double> sigmas,
                                              std::uint64_t seed, std::size_t replicas) {
  if (!(spec.r > 0.0) || !(spec.step > 0.0)) throw DomainError("twin peaks reference needs r > 0 and step > 0");
  if (!(spec.eps > 0.0 && spec.eps < spec.r / 6.0)) throw DomainError("twin peaks reference needs eps in (0, r/6)");
  for (double s : sigmas) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("sigma must lie in (0, 1)");
  }
  if (replicas == 0) throw DomainError("twin peaks reference needs replicas");
  const std::size_t half = grid_count(spec.r, spec.step, "r");
  const std::size_t width = 2 * half + 1;
  const double root = std::sqrt(spec.step);
  std::vector<double> w(width);
  std::vector<ProportionCounter> counts(sigmas.size());
  ProportionCounter mid;
  for (std::size_t j = 0; j < replicas; ++j) {
    CounterEngine eng({seed, j, kTwinTag});
    w[half] = 0.0;
    double right = 0.0;
    double left = 0.0;
    for (std::size_t i = 1; i <= half; ++i) {
      right += root * eng.gaussian();
      left += root * eng.gaussian();
      const double x = spec.step * static_cast<double>(i);
      w[half + i] = right + spec.K * x;
      w[half - i] = left - spec.K * x;
    }
    const auto arg = static_cast<std::size_t>(std::distance(w.begin(), std::max_element(w.begin(), w.end())));
    const double m = spec.step * (static_cast<double>(arg) - static_cast<double>(half));
    const bool in_mid = std::abs(m) <= spec.r / 3.0 + 1e-12;
    mid.add(in_mid);
    double threshold = std::numeric_limits<double>::infinity();
    if (in_mid) {
      for (std::size_t i = 0; i < width; ++i) {
        const double d = spec.step * std::abs(static_cast<double>(i) - static_cast<double>(arg));
        if (d < spec.eps - 1e-12 || d > 2.0 * spec.eps + 1e-12) continue;
        threshold = std::min(threshold, (w[arg] - w[i]) / std::sqrt(spec.eps));
      }
    }
    for (std::size_t s = 0; s < sigmas.size(); ++s) counts[s].add(in_mid && sigmas[s] >= threshold);
  }
  TwinPeaksReferenceResult res;
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    const auto [l, h] = proportion_ci(counts[s].successes, counts[s].trials);
    res.table.push_back({sigmas[s], counts[s].successes, counts[s].trials,
                         static_cast<double>(counts[s].successes) / static_cast<double>(counts[s].trials), l, h});
  }
  const auto [l, h] = proportion_ci(mid.successes, mid.trials);
  res.mid = {0.0, mid.successes, mid.trials, static_cast<double>(mid.successes) / static_cast<double>(mid.trials), l, h};
  return res;
}

}  // namespace kpzlab
