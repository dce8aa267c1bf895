#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kpzlab/noise_field.hpp"
#include "kpzlab/report.hpp"

namespace kpzlab {

enum class ParamType { integer, real, boolean, real_list, text };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::real;
  std::string default_value;
  std::string help;
};

/// Validated parameters of one run. Values are kept as the strings the user
/// supplied (or the defaults), so the echo in the report is verbatim.
class RunConfig {
 public:
  std::string experiment;
  std::map<std::string, std::string> values;
  unsigned threads = 1;

  [[nodiscard]] long long integer(std::string_view key) const;
  [[nodiscard]] int small_int(std::string_view key) const;
  [[nodiscard]] std::uint64_t seed() const;
  [[nodiscard]] double real(std::string_view key) const;
  [[nodiscard]] bool flag(std::string_view key) const;
  [[nodiscard]] std::vector<double> reals(std::string_view key) const;
  [[nodiscard]] const std::string& text(std::string_view key) const;

 private:
  [[nodiscard]] const std::string& raw(std::string_view key) const;
};

struct ExperimentDef {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
  std::function<ExperimentReport(const RunConfig&)> run;
  /// Parameter halved by the refinement mode; empty when the run has no step.
  std::string step_key = "delta";
};

const std::vector<ExperimentDef>& experiments();
const ExperimentDef& find_experiment(std::string_view name);

/// Applies overrides on top of the defaults and parses every value. Unknown
/// keys and malformed values throw DomainError before any computation.
RunConfig make_config(const ExperimentDef& def, const std::map<std::string, std::string>& overrides,
                      unsigned threads = 1);

/// Runs the experiment. With refine = true the run is repeated at half the
/// discretization step and the shift of every statistic is reported.
ExperimentReport run_experiment(const RunConfig& config);

/// Thread count from KPZLAB_THREADS, else the hardware concurrency.
unsigned default_threads();

/// Field on levels 0..level_count-1 covering [lo, hi] with grid step `grid_step`
/// anchored at a multiple of `grid_step`, sampled at `grid_step / refine`.
NoiseField experiment_field(int level_count, double lo, double hi, double grid_step, std::uint64_t seed,
                            std::uint64_t replica, int refine = 1);

}  // namespace kpzlab
