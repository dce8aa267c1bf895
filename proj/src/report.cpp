#include "kpzlab/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kpzlab/brownian.hpp"
#include "kpzlab/error.hpp"

namespace kpzlab {

namespace {

std::vector<AcceptanceRule> build_rules() {
  using C = Comparison;
  return {
      {"A1.dp_mismatch", C::le, 0.0, 0.0, "geodesic energy vs DP maximum, mismatches at 1e-9 relative"},
      {"A1.brute_mismatch", C::le, 0.0, 0.0, "DP vs exhaustive enumeration on micro instances, mismatches"},
      {"A2.residual", C::le, 1e-9, 0.0, "normalized decomposition residual / (1 + |Z|)"},
      {"A3.unscaled_residual", C::le, 1e-9, 0.0, "|sum W_i - n| / n"},
      {"A3.scaled_residual", C::le, 1e-9, 0.0, "|sum omega_i - n^{1/3}/2| / (n^{1/3}/2)"},
      {"A4.ks", C::le, 0.05, 0.0, "two-sample KS, LPP energy vs sqrt(m1) G_{m2+1}(1)"},
      {"A4.refine_shift", C::le, 0.02, 0.0, "|KS(delta/2) - KS(delta)|"},
      {"A5.upper99", C::lt, 0.0, 0.0, "99% upper confidence bound of E Wgt_n[(0,0)->(0,1)]"},
      {"A5.ci_gap", C::le, 0.0, 0.0, "gap between LPP and GUE 99% mean intervals (<= 0 overlaps)"},
      {"A6.variance_ratio", C::within, 0.8, 1.2, "increment variance / (2 delta)"},
      {"A6.ks", C::le, 0.05, 0.0, "KS vs N(0, 2 delta)"},
      {"A7.geometry_exponent", C::within, 0.55, 0.80, "log-log slope of median mid-life Fluc"},
      {"A7.weight_exponent", C::within, 0.22, 0.45, "log-log slope of median |weight|"},
      {"A8.monotone_violations", C::le, 0.0, 0.0, "sigma pairs with p(sigma1) > p(sigma2), sigma1 < sigma2"},
      {"A8.ratio_spread", C::le, 10.0, 0.0, "max/min of p(sigma)/sigma"},
      {"A9.near_touch_spread", C::le, 5.0, 0.0, "max/min of p(eps)/eps"},
      {"A9.resampler_ks", C::le, 0.05, 0.0, "max over t in {1..5} of KS, resampler vs rejection"},
      {"A9.acceptance_rate", C::ge, resampler_acceptance_bound(), 0.0, "resampler acceptance rate"},
      {"A10.mean_fraction", C::lt, 0.95, 0.0, "mean cliff fraction |I|/m"},
      {"A10.upper99", C::lt, 0.99, 0.0, "99% upper confidence bound of the mean cliff fraction"},
      {"A11.monotone_violations", C::le, 0.0, 0.0, "replicas whose sup increases as theta decreases"},
      {"A11.median_gap", C::lt, 0.0, 0.0, "median constrained sup (smallest theta) - unconstrained median"},
      {"A12.mismatches", C::le, 0.0, 0.0, "replicas where the profile argmax differs from rho_n(a)"},
      {"A13.ks", C::le, 0.05, 0.0, "KS, rho^x(a) - x a vs (1 + n^{-2/3} x / 2) rho(a)"},
  };
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(10) << v;
  return o.str();
}

}  // namespace

bool AcceptanceRule::passes(double value) const noexcept {
  if (std::isnan(value)) return false;
  switch (cmp) {
    case Comparison::le:
      return value <= lo;
    case Comparison::lt:
      return value < lo;
    case Comparison::ge:
      return value >= lo;
    case Comparison::gt:
      return value > lo;
    case Comparison::within:
      return value >= lo && value <= hi;
  }
  return false;
}

std::string AcceptanceRule::describe() const {
  switch (cmp) {
    case Comparison::le:
      return "<= " + fmt(lo);
    case Comparison::lt:
      return "< " + fmt(lo);
    case Comparison::ge:
      return ">= " + fmt(lo);
    case Comparison::gt:
      return "> " + fmt(lo);
    case Comparison::within:
      return "in [" + fmt(lo) + ", " + fmt(hi) + "]";
  }
  return "";
}

const std::vector<AcceptanceRule>& acceptance_rules() {
  static const std::vector<AcceptanceRule> rules = build_rules();
  return rules;
}

const AcceptanceRule& acceptance_rule(std::string_view id) {
  for (const auto& r : acceptance_rules()) {
    if (r.id == id) return r;
  }
  throw DomainError("unknown acceptance rule " + std::string(id));
}

StatRecord& ExperimentReport::add(std::string name, double value, std::size_t count) {
  stats.push_back({std::move(name), value, std::nullopt, std::nullopt, count, "", std::nullopt});
  return stats.back();
}

StatRecord& ExperimentReport::add(std::string name, double value, double ci_lo, double ci_hi, std::size_t count) {
  stats.push_back({std::move(name), value, ci_lo, ci_hi, count, "", std::nullopt});
  return stats.back();
}

StatRecord& ExperimentReport::check(std::string name, double value, std::string_view rule_id, std::size_t count) {
  const auto& rule = acceptance_rule(rule_id);
  stats.push_back({std::move(name), value, std::nullopt, std::nullopt, count, rule.id, rule.passes(value)});
  return stats.back();
}

const StatRecord* ExperimentReport::find(std::string_view name) const {
  for (const auto& s : stats) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(stats.begin(), stats.end(), [](const StatRecord& s) { return !s.pass.has_value() || *s.pass; });
}

std::size_t ExperimentReport::checked_count() const {
  return static_cast<std::size_t>(
      std::count_if(stats.begin(), stats.end(), [](const StatRecord& s) { return s.pass.has_value(); }));
}

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["stats"] = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    nlohmann::ordered_json r;
    r["name"] = s.name;
    r["value"] = std::isfinite(s.value) ? nlohmann::ordered_json(s.value) : nlohmann::ordered_json(fmt(s.value));
    if (s.ci_lo) r["ci_lo"] = *s.ci_lo;
    if (s.ci_hi) r["ci_hi"] = *s.ci_hi;
    r["n"] = s.count;
    if (!s.rule.empty()) {
      r["rule"] = s.rule;
      r["threshold"] = acceptance_rule(s.rule).describe();
      r["pass"] = s.pass.value_or(false);
    }
    j["stats"].push_back(r);
  }
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json tj;
    tj["name"] = t.name;
    tj["columns"] = t.columns;
    tj["rows"] = t.rows;
    j["tables"].push_back(tj);
  }
  if (!notes.empty()) j["notes"] = notes;
  j["all_pass"] = all_pass();
  if (wall_clock_seconds) j["wall_clock_seconds"] = *wall_clock_seconds;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_text() const {
  std::ostringstream o;
  o << "experiment: " << experiment << "\n";
  std::size_t width = 4;
  for (const auto& s : stats) width = std::max(width, s.name.size());
  for (const auto& s : stats) {
    o << "  " << std::left << std::setw(static_cast<int>(width)) << s.name << "  " << std::right << std::setw(14)
      << fmt(s.value);
    if (s.ci_lo && s.ci_hi) o << "  [" << fmt(*s.ci_lo) << ", " << fmt(*s.ci_hi) << "]";
    if (s.count > 0) o << "  n=" << s.count;
    if (!s.rule.empty()) {
      o << "  " << s.rule << " " << acceptance_rule(s.rule).describe() << "  " << (s.pass.value_or(false) ? "PASS" : "FAIL");
    }
    o << "\n";
  }
  for (const auto& n : notes) o << "  note: " << n << "\n";
  if (wall_clock_seconds) o << "  wall clock: " << fmt(*wall_clock_seconds) << " s\n";
  o << (all_pass() ? "all checks pass" : "some checks FAIL") << "\n";
  return o.str();
}

std::string table_csv(const Table& t) {
  std::ostringstream o;
  for (std::size_t c = 0; c < t.columns.size(); ++c) o << (c ? "," : "") << t.columns[c];
  o << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) o << (c ? "," : "") << fmt(row[c]);
    o << "\n";
  }
  return o.str();
}

std::string ExperimentReport::stats_csv() const {
  std::ostringstream out;
  out << "name,value,ci_lo,ci_hi,n,rule,pass\n";
  for (const auto& s : stats) {
    out << s.name << "," << fmt(s.value) << "," << (s.ci_lo ? fmt(*s.ci_lo) : "") << ","
        << (s.ci_hi ? fmt(*s.ci_hi) : "") << "," << s.count << "," << s.rule << ","
        << (s.pass ? (*s.pass ? "true" : "false") : "") << "\n";
  }
  return out.str();
}

void ExperimentReport::write_csv(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "stats.csv") << stats_csv();
  for (const auto& t : tables) std::ofstream(dir / (t.name + ".csv")) << table_csv(t);
}

}  // namespace kpzlab
