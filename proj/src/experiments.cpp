#include "kpzlab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "kpzlab/acceptance.hpp"
#include "kpzlab/brownian.hpp"
#include "kpzlab/geometry.hpp"
#include "kpzlab/gue.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/routed_profile.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
  const auto t = trim(s);
  if (t.empty()) return false;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && p == t.data() + t.size() && std::isfinite(out);
}

bool parse_integer(const std::string& s, long long& out) {
  const auto t = trim(s);
  if (t.empty()) return false;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && p == t.data() + t.size();
}

bool parse_flag(const std::string& s, bool& out) {
  const auto t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    out = true;
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_reals(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    if (!parse_real(item, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

void validate(const ParamSpec& p, const std::string& value) {
  bool ok = true;
  double r = 0.0;
  long long i = 0;
  bool b = false;
  std::vector<double> list;
  switch (p.type) {
    case ParamType::integer:
      ok = parse_integer(value, i);
      break;
    case ParamType::real:
      ok = parse_real(value, r);
      break;
    case ParamType::boolean:
      ok = parse_flag(value, b);
      break;
    case ParamType::real_list:
      ok = parse_reals(value, list);
      break;
    case ParamType::text:
      break;
  }
  if (!ok) throw DomainError("invalid value '" + value + "' for " + p.key);
}

void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

std::size_t count_of(const RunConfig& c, std::string_view key, std::size_t minimum = 1) {
  const auto v = c.integer(key);
  if (v < static_cast<long long>(minimum)) {
    throw DomainError(std::string(key) + " must be at least " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(v);
}

double positive(const RunConfig& c, std::string_view key) {
  const double v = c.real(key);
  require(v > 0.0, std::string(key) + " must be positive");
  return v;
}

int lattice(int n, double s, const char* what) {
  const double v = s * n;
  const auto l = std::llround(v);
  require(std::abs(v - static_cast<double>(l)) <= 1e-9 * std::max(1.0, v), std::string(what) + " must lie on the 1/n lattice");
  return static_cast<int>(l);
}

void add_mean(ExperimentReport& r, const std::string& name, std::span<const double> v, double level = 0.95) {
  const auto m = mean_estimate(v, level);
  r.add(name, m.mean, m.ci_lo, m.ci_hi, m.count);
}

void add_median(ExperimentReport& r, const std::string& name, std::span<const double> v) {
  const auto m = median_estimate(v);
  r.add(name, m.median, m.ci_lo, m.ci_hi, v.size());
}

Table proportion_table(const std::string& name, const std::string& parameter,
                       const std::vector<ProportionEstimate>& rows) {
  Table t{name, {parameter, "p", "ci_lo", "ci_hi", "successes", "trials", "p_over_parameter"}, {}};
  for (const auto& e : rows) {
    t.rows.push_back({e.parameter, e.p, e.ci_lo, e.ci_hi, static_cast<double>(e.successes),
                      static_cast<double>(e.trials), e.parameter > 0.0 ? e.p / e.parameter : kInf});
  }
  return t;
}

/// max/min of p / parameter over the rows; +inf when some frequency is zero.
double ratio_spread(const std::vector<ProportionEstimate>& rows) {
  double lo = kInf;
  double hi = 0.0;
  for (const auto& e : rows) {
    const double q = e.p / e.parameter;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return lo > 0.0 ? hi / lo : kInf;
}

std::size_t monotone_violations(const std::vector<ProportionEstimate>& rows) {
  std::size_t v = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[i].parameter < rows[j].parameter && rows[i].p > rows[j].p) ++v;
    }
  }
  return v;
}

/// Unscaled horizontal coordinate of the scaled point (x, level / n).
double unscaled_x(int n, int level, double x) { return level + 2.0 * n_two_thirds(n) * x; }

// ---------------------------------------------------------------- field

ExperimentReport run_field(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 0, "n must be nonnegative");
  const double delta = positive(c, "delta");
  const double lo = c.real("x_min");
  const double hi = c.real("x_max");
  require(hi > lo, "x_max must exceed x_min");
  const auto f = NoiseField::generate(n + 1, lo, hi, delta, c.seed(), static_cast<std::uint64_t>(c.integer("replica")));
  ExperimentReport r;
  r.add("levels", f.level_count());
  r.add("grid_points", static_cast<double>(f.grid_size()));
  std::vector<double> inc;
  double cov = 0.0;
  std::size_t pairs = 0;
  for (int k = 0; k < f.level_count(); ++k) {
    for (Index i = 1; i < f.grid_size(); ++i) {
      const double d = f(k, i) - f(k, i - 1);
      inc.push_back(d);
      if (k + 1 < f.level_count()) {
        cov += d * (f(k + 1, i) - f(k + 1, i - 1));
        ++pairs;
      }
    }
  }
  if (inc.size() >= 2) r.add("increment_variance_over_step", sample_variance(inc) / delta, inc.size());
  if (pairs > 0) r.add("adjacent_level_correlation", cov / (static_cast<double>(pairs) * delta), pairs);
  const auto& dump = c.text("dump");
  if (!dump.empty()) {
    std::ofstream out(dump, std::ios::binary);
    if (!out) throw ComputeError("cannot open " + dump);
    f.write_binary(out);
    r.notes.push_back("field written to " + dump);
  }
  return r;
}

// ---------------------------------------------------------------- weight

struct Route {
  CompatibleTriple triple;
  double x;
  double y;
  double lo;
  double hi;
};

Route route_of(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 1, "n must be positive");
  CompatibleTriple triple(n, c.real("s1"), c.real("s2"));
  const double x = c.real("x");
  const double y = c.real("y");
  require(triple.s1() >= 0.0, "s1 must be nonnegative");
  const double margin = c.real("margin");
  require(margin >= 0.0, "margin must be nonnegative");
  const double u1 = unscaled_x(n, triple.level1(), x);
  const double u2 = unscaled_x(n, triple.level2(), y);
  return {triple, x, y, std::min(u1, u2) - margin, std::max(u1, u2) + margin};
}

ExperimentReport run_weight(const RunConfig& c) {
  const auto route = route_of(c);
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas", 2);
  const bool parabolic = c.flag("parabolic");
  const int levels = route.triple.level2() + 1;
  struct Pair {
    double grid = 0.0;
    double extrapolated = 0.0;
  };
  const auto w = parallel_map<Pair>(replicas, c.threads, [&](std::size_t j) {
    const auto fine = experiment_field(levels, route.lo, route.hi, delta, c.seed(), j, 2);
    const auto coarse = fine.subsample(2);
    const double wc = weight(coarse, route.triple, route.x, route.y, parabolic);
    const double wf = weight(fine, route.triple, route.x, route.y, parabolic);
    return Pair{wc, sqrt_step_extrapolate(wc, wf)};
  });
  std::vector<double> grid;
  std::vector<double> ext;
  for (const auto& p : w) {
    grid.push_back(p.grid);
    ext.push_back(p.extrapolated);
  }
  ExperimentReport r;
  add_mean(r, "weight_mean", ext);
  const auto m99 = mean_estimate(ext, 0.99);
  r.add("weight_mean_99", m99.mean, m99.ci_lo, m99.ci_hi, m99.count);
  r.add("weight_sd", m99.sd, replicas);
  add_median(r, "weight_median", ext);
  add_mean(r, "grid_weight_mean", grid);
  Table t{"samples", {"replica", "grid_weight", "extrapolated_weight"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) t.rows.push_back({static_cast<double>(j), grid[j], ext[j]});
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- polymer

ExperimentReport run_polymer(const RunConfig& c) {
  const auto route = route_of(c);
  const double delta = positive(c, "delta");
  const auto f = experiment_field(route.triple.level2() + 1, route.lo, route.hi, delta, c.seed(),
                                  static_cast<std::uint64_t>(c.integer("replica")));
  const auto p = polymer(f, route.triple, route.x, route.y);
  ExperimentReport r;
  r.add("weight", p.weight);
  r.add("energy", p.energy);
  double widest = 0.0;
  Table t{"departures", {"level", "s", "phi"}, {}};
  const int n = route.triple.n();
  for (int k = p.zigzag.first_level(); k <= p.zigzag.last_level(); ++k) {
    const double phi = p.zigzag.at_level(k);
    t.rows.push_back({static_cast<double>(k), static_cast<double>(k) / n, phi});
    widest = std::max(widest, std::abs(phi));
  }
  r.add("max_abs_departure", widest);
  const int mid = (route.triple.level1() + route.triple.level2()) / 2;
  r.add("fluc_mid", fluc(p, static_cast<double>(mid) / n));
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- profile

ExperimentReport run_profile(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 2, "n must be at least 2");
  const double a = c.real("a");
  const int na = lattice(n, a, "a");
  require(na > 0 && na < n, "a must lie strictly between 0 and 1");
  const double delta = positive(c, "delta");
  const double x_step = c.real("x_step");
  require(x_step >= 0.0, "x_step must be nonnegative");
  const auto f = NoiseField::generate(n + 1, 0.0, n, delta, c.seed(), static_cast<std::uint64_t>(c.integer("replica")));
  const double half = 0.5 * std::cbrt(static_cast<double>(n));
  const auto prof = routed_profile(f, n, a, -half * a, half * (1.0 - a), x_step);
  const auto p = polymer(f, CompatibleTriple(n, 0.0, 1.0), 0.0, 0.0);
  const Index departure = f.grid_index(p.zigzag.staircase().z(na + 1));
  ExperimentReport r;
  r.add("max", prof.max_value);
  r.add("argmax_x", prof.argmax_x);
  r.add("polymer_weight", p.weight);
  r.add("polymer_departure", p.zigzag.at_level(na));
  const double mismatch = prof.grid_index[prof.argmax] == departure ? 0.0 : 1.0;
  if (x_step == 0.0) {
    r.check("argmax_mismatch", mismatch, "A12.mismatches", 1);
  } else {
    r.add("argmax_mismatch", mismatch, 1);
  }
  r.check("decomposition_residual", normalized_decomposition_check(f, prof), "A2.residual", prof.z_values.size());
  Table t{"profile", {"x", "z", "forward", "backward"}, {}};
  for (std::size_t i = 0; i < prof.x_grid.size(); ++i) {
    t.rows.push_back({prof.x_grid[i], prof.z_values[i], prof.forward[i], prof.backward[i]});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- twin peaks

ExperimentReport run_twin_peaks(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 2, "n must be at least 2");
  const double a = c.real("a");
  const int na = lattice(n, a, "a");
  require(na > 0 && na < n, "a must lie strictly between 0 and 1");
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas");
  const TwinPeakParams params{c.real("R"), c.real("ell"), c.real("ell_prime"), c.real("eps")};
  require(params.eps > 0.0 && 3.0 * params.eps < params.ell_prime && params.ell_prime <= params.ell,
          "twin peaks needs 0 < 3 eps < ell' <= ell");
  const auto sigmas = c.reals("sigmas");
  for (double s : sigmas) require(s > 0.0, "sigmas must be positive");
  const double half = 0.5 * std::cbrt(static_cast<double>(n));
  const auto thresholds = parallel_map<std::optional<double>>(replicas, c.threads, [&](std::size_t j) {
    const auto f = NoiseField::generate(n + 1, 0.0, n, delta, c.seed(), j);
    return twin_peak_threshold(routed_profile(f, n, a, -half * a, half * (1.0 - a)), params);
  });
  const auto table = twin_peak_estimate(thresholds, sigmas);
  ExperimentReport r;
  const auto in_window = static_cast<std::size_t>(
      std::count_if(thresholds.begin(), thresholds.end(), [](const auto& t) { return t.has_value(); }));
  const auto [wl, wh] = proportion_ci(in_window, replicas);
  r.add("maximizer_in_window", static_cast<double>(in_window) / replicas, wl, wh, replicas);
  for (const auto& e : table) {
    std::ostringstream name;
    name << "p_sigma_" << e.parameter;
    r.add(name.str(), e.p, e.ci_lo, e.ci_hi, e.trials);
  }
  r.check("monotone_violations", static_cast<double>(monotone_violations(table)), "A8.monotone_violations",
          replicas);
  r.check("ratio_spread", ratio_spread(table), "A8.ratio_spread", replicas);
  r.tables.push_back(proportion_table("twin_peaks", "sigma", table));
  Table t{"thresholds", {"replica", "threshold"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) {
    t.rows.push_back({static_cast<double>(j), thresholds[j] ? *thresholds[j] : std::nan("")});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- brownianity

ExperimentReport run_brownianity(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 2, "n must be at least 2");
  const double a = c.real("a");
  const int na = lattice(n, a, "a");
  require(na > 0 && na < n, "a must lie strictly between 0 and 1");
  const double delta = positive(c, "delta");
  const double R = c.real("R");
  const double D = positive(c, "Delta");
  const std::size_t replicas = count_of(c, "replicas", 100);
  const double pad = 4.0 * delta;
  const auto inc = parallel_map<double>(replicas, c.threads, [&](std::size_t j) {
    const auto f = NoiseField::generate(n + 1, 0.0, n, delta, c.seed(), j);
    const auto prof = routed_profile(f, n, a, R - 0.5 * D - pad, R + 0.5 * D + pad);
    return brownianity_increment(prof, R, D);
  });
  const auto s = brownianity_stats(inc, n, a, R, D);
  ExperimentReport r;
  r.add("drift", s.drift);
  r.add("increment_mean", s.mean, s.samples);
  r.add("increment_variance", s.variance, s.samples);
  r.check("variance_ratio", s.variance / (2.0 * D), "A6.variance_ratio", s.samples);
  r.check("ks", s.ks_distance, "A6.ks", s.samples);
  r.add("ks_p_value", s.ks_p_value, s.samples);
  Table t{"increments", {"replica", "increment"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) t.rows.push_back({static_cast<double>(j), inc[j]});
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- deviation

ExperimentReport run_deviation(const RunConfig& c) {
  const auto route = route_of(c);
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas");
  const auto paths = parallel_map<PolymerPath>(replicas, c.threads, [&](std::size_t j) {
    const auto f = experiment_field(route.triple.level2() + 1, route.lo, route.hi, delta, c.seed(), j);
    return polymer(f, route.triple, route.x, route.y);
  });
  const auto d = deviation_stat(paths, c.real("a"), c.real("r"));
  ExperimentReport r;
  r.add("threshold", d.threshold);
  r.add("exceed_frequency", d.p, d.ci_lo, d.ci_hi, d.exceed.trials);
  add_median(r, "sup_fluc_median", d.sup_fluc);
  Table t{"sup_fluc", {"replica", "sup_fluc"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) t.rows.push_back({static_cast<double>(j), d.sup_fluc[j]});
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- cliffs

ExperimentReport run_cliffs(const RunConfig& c) {
  const int n = c.small_int("n");
  const int A = c.small_int("A");
  require(A >= 1 && n > A, "cliffs need 1 <= A < n");
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas", 2);
  const auto census = parallel_map<CliffCensus>(replicas, c.threads, [&](std::size_t j) {
    const auto f = NoiseField::generate(n + 1, 0.0, n, delta, c.seed(), j);
    return cliff_census(geodesic(f, {0.0, 0}, {static_cast<double>(n), n}), A);
  });
  std::vector<double> frac;
  for (const auto& cc : census) frac.push_back(cc.fraction);
  const auto m95 = mean_estimate(frac);
  const auto m99 = mean_estimate(frac, 0.99);
  ExperimentReport r;
  r.add("strips", census.front().m);
  r.check("mean_fraction", m95.mean, "A10.mean_fraction", replicas);
  r.stats.back().ci_lo = m95.ci_lo;
  r.stats.back().ci_hi = m95.ci_hi;
  r.check("upper99", m99.ci_hi, "A10.upper99", replicas);
  r.add("max_fraction", *std::max_element(frac.begin(), frac.end()), replicas);
  Table t{"fractions", {"replica", "fraction", "cliffs"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) {
    t.rows.push_back({static_cast<double>(j), frac[j], static_cast<double>(census[j].I.size())});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- steadiness

ExperimentReport run_steadiness(const RunConfig& c) {
  const int n = c.small_int("n");
  require(n >= 1, "n must be positive");
  const double delta = positive(c, "delta");
  const double beta1 = c.real("beta1");
  const std::size_t replicas = count_of(c, "replicas", 2);
  const auto st = parallel_map<Steadiness>(replicas, c.threads, [&](std::size_t j) {
    const auto f = NoiseField::generate(n + 1, 0.0, n, delta, c.seed(), j);
    return steadiness(polymer(f, CompatibleTriple(n, 0.0, 1.0), 0.0, 0.0), beta1);
  });
  double worst_u = 0.0;
  double worst_s = 0.0;
  std::vector<double> frac;
  for (const auto& s : st) {
    worst_u = std::max(worst_u, s.unscaled_residual / n);
    worst_s = std::max(worst_s, s.residual / (0.5 * std::cbrt(static_cast<double>(n))));
    frac.push_back(static_cast<double>(s.count_at_least) / static_cast<double>(s.omega.size()));
  }
  ExperimentReport r;
  r.check("unscaled_residual", worst_u, "A3.unscaled_residual", replicas);
  r.check("scaled_residual", worst_s, "A3.scaled_residual", replicas);
  add_mean(r, "fraction_at_least_beta1", frac);
  Table t{"steadiness", {"replica", "fraction_at_least_beta1"}, {}};
  for (std::size_t j = 0; j < replicas; ++j) t.rows.push_back({static_cast<double>(j), frac[j]});
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- slender

ExperimentReport run_slender(const RunConfig& c) {
  SlenderConfig cfg;
  cfg.n = c.small_int("n");
  cfg.ell = c.small_int("ell");
  cfg.chi = c.real("chi");
  cfg.thetas = c.reals("thetas");
  require(cfg.n >= 2 && cfg.ell >= 0, "slender needs n >= 2 and ell >= 0");
  require(std::is_sorted(cfg.thetas.rbegin(), cfg.thetas.rend()), "thetas must be listed in decreasing order");
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas", 2);
  const double reach = 2.0 * n_two_thirds(cfg.n) * 0.25 + 1.0;
  const auto reference = straight_reference(cfg.n);
  const auto reps = parallel_map<SlenderReplica>(replicas, c.threads, [&](std::size_t j) {
    const auto f = experiment_field(cfg.n + 1, -reach, cfg.n + reach, delta, c.seed(), j);
    return slender_shortfall(f, reference, cfg);
  });

  ExperimentReport r;
  std::size_t violations = 0;
  std::size_t irregular = 0;
  std::vector<std::vector<double>> sups(cfg.thetas.size());
  std::vector<double> free;
  std::vector<std::size_t> empty(cfg.thetas.size(), 0);
  for (const auto& rep : reps) {
    if (!rep.regular) {
      ++irregular;
      continue;
    }
    free.push_back(rep.unconstrained_sup);
    double prev = rep.unconstrained_sup;
    for (std::size_t t = 0; t < cfg.thetas.size(); ++t) {
      const double v = rep.sup[t] ? *rep.sup[t] : -kInf;
      if (!rep.sup[t]) ++empty[t];
      if (v > prev) {
        ++violations;
        break;
      }
      prev = v;
      sups[t].push_back(v);
    }
  }
  r.add("irregular_references", static_cast<double>(irregular), replicas);
  r.check("monotone_violations", static_cast<double>(violations), "A11.monotone_violations", replicas);
  require(free.size() >= 2, "too few regular replicas");
  const auto free_med = median_estimate(free);
  r.add("unconstrained_median", free_med.median, free_med.ci_lo, free_med.ci_hi, free.size());
  Table t{"slender", {"theta", "median", "ci_lo", "ci_hi", "empty", "hypothesis_holds"}, {}};
  for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
    const auto m = median_estimate(sups[i]);
    const bool hyp = slender_hypothesis_holds(cfg.n, cfg.ell, cfg.thetas[i]);
    t.rows.push_back({cfg.thetas[i], m.median, m.ci_lo, m.ci_hi, static_cast<double>(empty[i]), hyp ? 1.0 : 0.0});
    std::ostringstream name;
    name << "median_theta_" << cfg.thetas[i];
    r.add(name.str(), m.median, m.ci_lo, m.ci_hi, sups[i].size());
    if (!hyp) {
      std::ostringstream note;
      note << "theta " << cfg.thetas[i] << ": 2^ell <= n theta^40 fails";
      r.notes.push_back(note.str());
    }
  }
  const auto smallest = median_estimate(sups.back());
  r.check("median_gap", smallest.median - free_med.median, "A11.median_gap", sups.back().size());
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- GUE oracle

struct OracleSamples {
  std::vector<double> grid;
  std::vector<double> extrapolated;
};

OracleSamples lpp_oracle_samples(int m1, int m2, double delta, std::uint64_t seed, std::size_t count, unsigned threads) {
  struct Pair {
    double grid = 0.0;
    double ext = 0.0;
  };
  const auto v = parallel_map<Pair>(count, threads, [&](std::size_t j) {
    const auto fine = experiment_field(m2 + 1, 0.0, m1, delta, seed, j, 2);
    const auto coarse = fine.subsample(2);
    const double ec = max_energy_profile(coarse, {0.0, 0}, m2).values.back();
    const double ef = max_energy_profile(fine, {0.0, 0}, m2).values.back();
    return Pair{ec, sqrt_step_extrapolate(ec, ef)};
  });
  OracleSamples out;
  for (const auto& p : v) {
    out.grid.push_back(p.grid);
    out.extrapolated.push_back(p.ext);
  }
  return out;
}

ExperimentReport run_oracle_gue(const RunConfig& c) {
  const auto& mode = c.text("mode");
  const double delta = positive(c, "delta");
  ExperimentReport r;
  if (mode == "ks") {
    const int m1 = c.small_int("m1");
    const int m2 = c.small_int("m2");
    require(m1 >= 1 && m2 >= 0, "need m1 >= 1 and m2 >= 0");
    const std::size_t count = count_of(c, "count", 200);
    const auto gue = sample_lambda_max({m2 + 1, static_cast<double>(m1), c.seed()}, count);
    const auto base = lpp_oracle_samples(m1, m2, delta, c.seed(), count, c.threads);
    const auto half = lpp_oracle_samples(m1, m2, 0.5 * delta, c.seed(), count, c.threads);
    const auto ks = ks_two_sample(base.extrapolated, gue);
    const auto ks_half = ks_two_sample(half.extrapolated, gue);
    r.check("ks", ks.distance, "A4.ks", count);
    r.add("ks_p_value", ks.p_value, count);
    r.add("ks_half_step", ks_half.distance, count);
    r.check("refine_shift", std::abs(ks_half.distance - ks.distance), "A4.refine_shift", count);
    r.add("grid_ks", ks_two_sample(base.grid, gue).distance, count);
    r.add("grid_ks_half_step", ks_two_sample(half.grid, gue).distance, count);
    add_mean(r, "lpp_mean", base.extrapolated);
    add_mean(r, "lpp_grid_mean", base.grid);
    add_mean(r, "gue_mean", gue);
    Table t{"samples", {"index", "lpp_grid", "lpp_extrapolated", "gue"}, {}};
    for (std::size_t j = 0; j < count; ++j) {
      t.rows.push_back({static_cast<double>(j), base.grid[j], base.extrapolated[j], gue[j]});
    }
    r.tables.push_back(std::move(t));
  } else if (mode == "mean") {
    const int n = c.small_int("n");
    require(n >= 1, "n must be positive");
    const std::size_t count = count_of(c, "count", 2);
    const auto lpp = lpp_oracle_samples(n, n, delta, c.seed(), count, c.threads);
    std::vector<double> w;
    std::vector<double> wg;
    for (std::size_t j = 0; j < count; ++j) {
      w.push_back(weight_from_energy(n, lpp.extrapolated[j], {0.0, 0}, {static_cast<double>(n), n}));
      wg.push_back(weight_from_energy(n, lpp.grid[j], {0.0, 0}, {static_cast<double>(n), n}));
    }
    const auto gue = gue_weight_samples(n, c.seed(), count);
    const auto ml = mean_estimate(w, 0.99);
    const auto mg = mean_estimate(gue, 0.99);
    r.add("lpp_weight_mean", ml.mean, ml.ci_lo, ml.ci_hi, count);
    r.check("upper99", ml.ci_hi, "A5.upper99", count);
    r.add("gue_weight_mean", mg.mean, mg.ci_lo, mg.ci_hi, count);
    r.check("ci_gap", std::max(ml.ci_lo, mg.ci_lo) - std::min(ml.ci_hi, mg.ci_hi), "A5.ci_gap", count);
    add_mean(r, "grid_weight_mean", wg, 0.99);
    Table t{"samples", {"index", "lpp_grid_weight", "lpp_weight", "gue_weight"}, {}};
    for (std::size_t j = 0; j < count; ++j) t.rows.push_back({static_cast<double>(j), wg[j], w[j], gue[j]});
    r.tables.push_back(std::move(t));
  } else {
    throw DomainError("mode must be ks or mean");
  }
  return r;
}

// ---------------------------------------------------------------- Brownian oracle

ExperimentReport run_oracle_brownian(const RunConfig& c) {
  BridgeSpec spec;
  spec.s = c.real("s");
  spec.y = c.real("y");
  spec.step = positive(c, "step");
  const double r0 = positive(c, "r");
  const auto eps = c.reals("eps");
  for (double e : eps) require(e > 0.0, "eps must be positive");
  const std::size_t replicas = count_of(c, "replicas");
  const std::size_t ks_count = count_of(c, "ks_count", 20);
  ExperimentReport r;

  const auto nt = near_touch_prob(spec, r0, eps, c.seed(), replicas);
  for (const auto& e : nt.table) {
    std::ostringstream name;
    name << "near_touch_eps_" << e.parameter;
    r.add(name.str(), e.p, e.ci_lo, e.ci_hi, e.trials);
  }
  r.check("near_touch_spread", ratio_spread(nt.table), "A9.near_touch_spread", replicas);
  r.add("rejection_acceptance_rate", nt.diagnostics.acceptance_rate(), nt.diagnostics.proposals);
  r.tables.push_back(proportion_table("near_touch", "eps", nt.table));

  auto draw = [&](BridgeMethod m, std::uint64_t offset, SamplerDiagnostics& diag) {
    std::vector<SamplerDiagnostics> d(ks_count);
    auto b = parallel_map<std::vector<double>>(ks_count, c.threads, [&](std::size_t j) {
      return sample_conditioned_bridge(spec, c.seed(), offset + j, m, &d[j]).values;
    });
    for (const auto& x : d) diag.merge(x);
    return b;
  };
  SamplerDiagnostics rej_diag;
  SamplerDiagnostics res_diag;
  SamplerDiagnostics free_diag;
  const auto rej = draw(BridgeMethod::rejection, 1'000'000'000ULL, rej_diag);
  const auto res = draw(BridgeMethod::resampler, 2'000'000'000ULL, res_diag);
  const auto fre = draw(BridgeMethod::resampler_free, 3'000'000'000ULL, free_diag);
  const auto per_unit = static_cast<std::size_t>(std::llround(1.0 / spec.step));
  double worst = 0.0;
  double worst_free = 0.0;
  Table t{"resampler_ks", {"t", "ks_resampler", "p_resampler", "ks_free", "p_free"}, {}};
  for (std::size_t tt = 1; tt <= 5; ++tt) {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> f;
    for (std::size_t j = 0; j < ks_count; ++j) {
      a.push_back(rej[j][tt * per_unit]);
      b.push_back(res[j][tt * per_unit]);
      f.push_back(fre[j][tt * per_unit]);
    }
    const auto k1 = ks_two_sample(a, b);
    const auto k2 = ks_two_sample(a, f);
    worst = std::max(worst, k1.distance);
    worst_free = std::max(worst_free, k2.distance);
    t.rows.push_back({static_cast<double>(tt), k1.distance, k1.p_value, k2.distance, k2.p_value});
  }
  r.check("resampler_ks", worst, "A9.resampler_ks", ks_count);
  r.check("acceptance_rate", res_diag.acceptance_rate(), "A9.acceptance_rate", res_diag.proposals);
  r.add("free_resampler_ks", worst_free, ks_count);
  r.add("free_resampler_acceptance_rate", free_diag.acceptance_rate(), free_diag.proposals);
  r.add("acceptance_bound", resampler_acceptance_bound());
  r.tables.push_back(std::move(t));

  const std::size_t ref_replicas = count_of(c, "ref_replicas", 0);
  if (ref_replicas > 0) {
    const TwinPeaksReferenceSpec ref{c.real("K"), c.real("ref_r"), c.real("ref_eps"), positive(c, "ref_step")};
    const auto tp = twin_peaks_reference(ref, c.reals("sigmas"), c.seed(), ref_replicas);
    r.add("reference_mid", tp.mid.p, tp.mid.ci_lo, tp.mid.ci_hi, tp.mid.trials);
    for (const auto& e : tp.table) {
      std::ostringstream name;
      name << "reference_sigma_" << e.parameter;
      r.add(name.str(), e.p, e.ci_lo, e.ci_hi, e.trials);
    }
    r.tables.push_back(proportion_table("twin_peaks_reference", "sigma", tp.table));
  }
  return r;
}

// ---------------------------------------------------------------- exponents

ExperimentReport run_exponents(const RunConfig& c) {
  const int n = c.small_int("n");
  const int kmin = c.small_int("kmin");
  const int kmax = c.small_int("kmax");
  require(kmin >= 1 && kmax >= kmin + 2, "need 1 <= kmin and kmax >= kmin + 2");
  const double delta = positive(c, "delta");
  const std::size_t replicas = count_of(c, "replicas", 2);
  std::vector<double> hs;
  std::vector<CompatibleTriple> triples;
  for (int k = kmin; k <= kmax; ++k) {
    const double h = std::ldexp(1.0, -k);
    hs.push_back(h);
    triples.emplace_back(n, 0.5 - 0.5 * h, 0.5 + 0.5 * h);
  }
  const int top = triples.front().level2();
  const double lo = triples.front().level1();
  struct Row {
    std::vector<double> fl;
    std::vector<double> w;
  };
  const auto rows = parallel_map<Row>(replicas, c.threads, [&](std::size_t j) {
    const auto fine = experiment_field(top + 1, lo, top, delta, c.seed(), j, 2);
    const auto coarse = fine.subsample(2);
    Row row;
    for (const auto& tr : triples) {
      const auto p = polymer(coarse, tr, 0.0, 0.0);
      row.fl.push_back(fluc(p, 0.5));
      row.w.push_back(std::abs(sqrt_step_extrapolate(p.weight, weight(fine, tr, 0.0, 0.0))));
    }
    return row;
  });
  ExperimentReport r;
  std::vector<double> med_f;
  std::vector<double> med_w;
  Table t{"exponents", {"h", "fluc_median", "fluc_ci_lo", "fluc_ci_hi", "abs_weight_median", "weight_ci_lo", "weight_ci_hi"}, {}};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    std::vector<double> f;
    std::vector<double> w;
    for (const auto& row : rows) {
      f.push_back(row.fl[i]);
      w.push_back(row.w[i]);
    }
    const auto mf = median_estimate(f);
    const auto mw = median_estimate(w);
    med_f.push_back(mf.median);
    med_w.push_back(mw.median);
    t.rows.push_back({hs[i], mf.median, mf.ci_lo, mf.ci_hi, mw.median, mw.ci_lo, mw.ci_hi});
  }
  const auto gf = exponent_fit(hs, med_f);
  const auto gw = exponent_fit(hs, med_w);
  r.check("geometry_exponent", gf.slope, "A7.geometry_exponent", replicas);
  r.stats.back().ci_lo = gf.slope - 2.0 * gf.slope_se;
  r.stats.back().ci_hi = gf.slope + 2.0 * gf.slope_se;
  r.check("weight_exponent", gw.slope, "A7.weight_exponent", replicas);
  r.stats.back().ci_lo = gw.slope - 2.0 * gw.slope_se;
  r.stats.back().ci_hi = gw.slope + 2.0 * gw.slope_se;
  r.add("geometry_fit_residual", gf.residual);
  r.add("weight_fit_residual", gw.residual);
  r.tables.push_back(std::move(t));
  return r;
}

ParamSpec I(std::string k, std::string d, std::string h) { return {std::move(k), ParamType::integer, std::move(d), std::move(h)}; }
ParamSpec R(std::string k, std::string d, std::string h) { return {std::move(k), ParamType::real, std::move(d), std::move(h)}; }
ParamSpec B(std::string k, std::string d, std::string h) { return {std::move(k), ParamType::boolean, std::move(d), std::move(h)}; }
ParamSpec L(std::string k, std::string d, std::string h) { return {std::move(k), ParamType::real_list, std::move(d), std::move(h)}; }
ParamSpec T(std::string k, std::string d, std::string h) { return {std::move(k), ParamType::text, std::move(d), std::move(h)}; }

std::vector<ParamSpec> common(std::vector<ParamSpec> p) {
  p.push_back(I("seed", "1", "master seed"));
  p.push_back(B("refine", "false", "repeat at half the step and report shifts"));
  return p;
}

std::vector<ParamSpec> route_params(std::string n, std::string replicas) {
  return {I("n", std::move(n), "scaling parameter"),
          R("s1", "0", "start height"),
          R("s2", "1", "end height"),
          R("x", "0", "scaled start location"),
          R("y", "0", "scaled end location"),
          R("delta", "0.01", "grid step"),
          R("margin", "0", "extra unscaled extent on each side"),
          I("replicas", std::move(replicas), "independent fields")};
}

std::vector<ExperimentDef> build() {
  std::vector<ExperimentDef> d;
  d.push_back({"field", "generate one noise field and report increment statistics",
               common({I("n", "10", "top level"), R("x_min", "0", "left end"), R("x_max", "10", "right end"),
                       R("delta", "0.01", "grid step"), I("replica", "0", "replica index"),
                       T("dump", "", "binary dump path (empty: none)")}),
               run_field});
  {
    auto p = route_params("100", "100");
    p.push_back(B("parabolic", "false", "add the parabolic term"));
    d.push_back({"weight", "weight between two scaled points, continuum-extrapolated", common(p), run_weight});
  }
  {
    auto p = route_params("64", "1");
    p.erase(p.end() - 1);
    p.push_back(I("replica", "0", "replica index"));
    d.push_back({"polymer", "one polymer and its departure table", common(p), run_polymer});
  }
  d.push_back({"profile", "routed weight profile, decomposition check and maximizer",
               common({I("n", "100", "scaling parameter"), R("a", "0.5", "departure height"),
                       R("delta", "0.01", "grid step"), I("replica", "0", "replica index"),
                       R("x_step", "0", "scaled sampling step (0: every grid point)")}),
               run_profile});
  d.push_back({"twin-peaks", "twin-peak frequency of the routed profile per sigma",
               common({I("n", "100", "scaling parameter"), R("a", "0.5", "departure height"),
                       R("R", "0", "window centre"), R("ell", "1.5", "maximizer window width"),
                       R("ell_prime", "1.5", "annulus outer width"), R("eps", "0.05", "annulus inner radius"),
                       L("sigmas", "0.05,0.1,0.2,0.4", "sigma list"), I("replicas", "500", "independent fields"),
                       R("delta", "0.01", "grid step")}),
               run_twin_peaks});
  d.push_back({"brownianity", "drift-adjusted profile increments against rate-two Brownian motion",
               common({I("n", "200", "scaling parameter"), R("a", "0.5", "departure height"),
                       R("R", "0", "increment centre"), R("Delta", "0.25", "increment length"),
                       I("replicas", "2000", "independent fields"), R("delta", "0.01", "grid step")}),
               run_brownianity});
  {
    auto p = route_params("128", "200");
    p.push_back(R("a", "0.125", "lifetime fraction"));
    p.push_back(R("r", "1", "threshold multiplier"));
    d.push_back({"deviation", "polymer deviation from the chord near its endpoints", common(p), run_deviation});
  }
  d.push_back({"cliffs", "cliff census of point-to-point geodesics",
               common({I("n", "200", "levels"), I("A", "8", "strip height"), I("replicas", "200", "independent fields"),
                       R("delta", "0.01", "grid step")}),
               run_cliffs});
  d.push_back({"steadiness", "horizontal advances of the (0,0) -> (0,1) polymer",
               common({I("n", "100", "scaling parameter"), R("beta1", "0.5", "advance threshold"),
                       I("replicas", "100", "independent fields"), R("delta", "0.01", "grid step")}),
               run_steadiness});
  d.push_back({"slender", "constrained weight shortfall around the straight reference",
               common({I("n", "64", "scaling parameter"), I("ell", "2", "dyadic lifetime exponent"),
                       R("chi", "0.25", "allowed violating fraction"), L("thetas", "0.5,0.25,0.125", "tube widths"),
                       I("replicas", "100", "independent fields"), R("delta", "0.01", "grid step")}),
               run_slender});
  d.push_back({"oracle-gue", "LPP energies against the GUE top eigenvalue",
               common({T("mode", "ks", "ks (energy law) or mean (negative weight mean)"), I("m1", "10", "horizontal extent"),
                       I("m2", "10", "levels above the start"), I("n", "100", "scaling parameter for mode mean"),
                       I("count", "2000", "samples per side"), R("delta", "0.001", "grid step")}),
               run_oracle_gue});
  d.push_back({"oracle-brownian", "conditioned bridges, resampler check and drifted Brownian twin peaks",
               common({R("s", "6", "bridge length"), R("y", "-1", "bridge endpoint"), R("step", "0.01", "time step"),
                       R("r", "2", "near-touch scale"), L("eps", "0.01,0.02,0.05,0.1", "near-touch list"),
                       I("replicas", "100000", "near-touch samples"), I("ks_count", "2000", "samples per sampler"),
                       R("K", "0", "reference drift"), R("ref_r", "3", "reference half width"),
                       R("ref_eps", "0.1", "reference annulus"), R("ref_step", "0.001", "reference step"),
                       L("sigmas", "0.1,0.2,0.4", "reference sigma list"),
                       I("ref_replicas", "2000", "reference samples (0: skip)")}),
               run_oracle_brownian, "step"});
  d.push_back({"exponents", "median fluctuation and weight across dyadic durations",
               common({I("n", "256", "scaling parameter"), I("kmin", "2", "largest duration 2^-kmin"),
                       I("kmax", "6", "smallest duration 2^-kmax"), I("replicas", "300", "independent fields"),
                       R("delta", "0.01", "grid step")}),
               run_exponents});
  d.push_back({"acceptance-suite", "acceptance criteria A1-A13",
               {T("profile", "full", "full (A1-A13) or quick (A1-A5)"), T("only", "", "comma-separated criterion ids")},
               run_acceptance_report, ""});
  return d;
}

}  // namespace

const std::string& RunConfig::raw(std::string_view key) const {
  const auto it = values.find(std::string(key));
  if (it == values.end()) throw DomainError("parameter " + std::string(key) + " is not defined for " + experiment);
  return it->second;
}

long long RunConfig::integer(std::string_view key) const {
  long long v = 0;
  if (!parse_integer(raw(key), v)) throw DomainError("parameter " + std::string(key) + " is not an integer");
  return v;
}

int RunConfig::small_int(std::string_view key) const {
  const auto v = integer(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw DomainError("parameter " + std::string(key) + " out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t RunConfig::seed() const {
  const auto v = integer("seed");
  if (v < 0) throw DomainError("seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

double RunConfig::real(std::string_view key) const {
  double v = 0.0;
  if (!parse_real(raw(key), v)) throw DomainError("parameter " + std::string(key) + " is not a number");
  return v;
}

bool RunConfig::flag(std::string_view key) const {
  bool v = false;
  if (!parse_flag(raw(key), v)) throw DomainError("parameter " + std::string(key) + " is not a boolean");
  return v;
}

std::vector<double> RunConfig::reals(std::string_view key) const {
  std::vector<double> v;
  if (!parse_reals(raw(key), v)) throw DomainError("parameter " + std::string(key) + " is not a number list");
  return v;
}

const std::string& RunConfig::text(std::string_view key) const { return raw(key); }

const std::vector<ExperimentDef>& experiments() {
  static const std::vector<ExperimentDef> defs = build();
  return defs;
}

const ExperimentDef& find_experiment(std::string_view name) {
  for (const auto& d : experiments()) {
    if (d.name == name) return d;
  }
  throw DomainError("unknown experiment " + std::string(name));
}

RunConfig make_config(const ExperimentDef& def, const std::map<std::string, std::string>& overrides, unsigned threads) {
  RunConfig c;
  c.experiment = def.name;
  c.threads = std::max(1u, threads);
  for (const auto& p : def.params) c.values[p.key] = p.default_value;
  for (const auto& [k, v] : overrides) {
    if (!c.values.contains(k)) throw DomainError("unknown parameter " + k + " for " + def.name);
    c.values[k] = v;
  }
  for (const auto& p : def.params) validate(p, c.values[p.key]);
  return c;
}

ExperimentReport run_experiment(const RunConfig& config) {
  const auto& def = find_experiment(config.experiment);
  auto report = def.run(config);
  report.experiment = config.experiment;
  report.config = config.values;
  if (!def.step_key.empty() && config.flag("refine")) {
    RunConfig half = config;
    half.values["refine"] = "false";
    std::ostringstream step;
    step.precision(17);
    step << 0.5 * config.real(def.step_key);
    half.values[def.step_key] = step.str();
    const auto refined = def.run(half);
    std::vector<StatRecord> shifts;
    for (const auto& s : report.stats) {
      const auto* t = refined.find(s.name);
      if (t == nullptr) continue;
      StatRecord rec;
      rec.name = "refine_shift." + s.name;
      rec.value = t->value - s.value;
      rec.count = t->count;
      shifts.push_back(rec);
    }
    report.stats.insert(report.stats.end(), shifts.begin(), shifts.end());
    report.notes.push_back("refinement run at " + def.step_key + " = " + step.str());
  }
  return report;
}

unsigned default_threads() {
  if (const char* env = std::getenv("KPZLAB_THREADS")) {
    long long v = 0;
    if (parse_integer(env, v) && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

NoiseField experiment_field(int level_count, double lo, double hi, double grid_step, std::uint64_t seed,
                            std::uint64_t replica, int refine) {
  if (refine < 1) throw DomainError("refine factor must be positive");
  const double x_min = grid_step * std::floor(lo / grid_step + 1e-9);
  const double cells = std::ceil((hi - x_min) / grid_step - 1e-9);
  const double x_max = x_min + grid_step * std::max(1.0, cells);
  return NoiseField::generate(level_count, x_min, x_max, grid_step / refine, seed, replica);
}

}  // namespace kpzlab
