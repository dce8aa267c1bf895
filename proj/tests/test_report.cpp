#include <doctest.h>

#include <algorithm>
#include <random>

#include "kpzlab/parallel.hpp"
#include "kpzlab/report.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;

TEST_CASE("rule table ids are unique and comparisons behave") {
  const auto& rules = acceptance_rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) CHECK(rules[i].id != rules[j].id);
  }
  CHECK(acceptance_rule("A4.ks").passes(0.05));
  CHECK_FALSE(acceptance_rule("A4.ks").passes(0.0501));
  CHECK_FALSE(acceptance_rule("A5.upper99").passes(0.0));
  CHECK(acceptance_rule("A6.variance_ratio").passes(1.0));
  CHECK_FALSE(acceptance_rule("A6.variance_ratio").passes(1.3));
  CHECK_FALSE(acceptance_rule("A4.ks").passes(std::nan("")));
  CHECK_THROWS_AS(acceptance_rule("A99"), DomainError);
}

TEST_CASE("report flags cite their rule and serialize deterministically") {
  ExperimentReport r;
  r.experiment = "demo";
  r.config["n"] = "10";
  r.add("mean", 1.5, 1.0, 2.0, 30);
  r.check("ks", 0.02, "A4.ks", 2000);
  CHECK(r.all_pass());
  CHECK(r.checked_count() == 1);
  CHECK(r.find("ks")->rule == "A4.ks");
  const auto j1 = r.to_json();
  CHECK(j1 == r.to_json());
  CHECK(j1.find("wall_clock") == std::string::npos);
  r.check("ks_bad", 0.2, "A4.ks");
  CHECK_FALSE(r.all_pass());
  CHECK(r.to_text().find("FAIL") != std::string::npos);
}

TEST_CASE("table CSV layout") {
  Table t{"tbl", {"x", "y"}, {{1.0, 2.5}, {3.0, -1.0}}};
  CHECK(table_csv(t) == "x,y\n1,2.5\n3,-1\n");
}

TEST_CASE("parallel map is invariant to the thread count") {
  auto f = [](std::size_t i) {
    CounterEngine eng({1, i, 0});
    double s = 0.0;
    for (int k = 0; k < 100; ++k) s += eng.gaussian();
    return s;
  };
  const auto one = parallel_map<double>(257, 1, f);
  const auto many = parallel_map<double>(257, 8, f);
  CHECK(one == many);
}

TEST_CASE("parallel for rethrows worker failures") {
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw ComputeError("boom");
                               }),
                  ComputeError);
}

TEST_CASE("partial accumulators merged in any order give one report") {
  std::vector<ReplicaSamples> parts(7);
  std::vector<ProportionCounter> counts(7);
  for (std::uint64_t r = 0; r < 700; ++r) {
    const double v = std::sin(static_cast<double>(r));
    parts[r % 7].add(r, v);
    counts[r % 7].add(v > 0.0);
  }
  auto reduce = [&](std::vector<std::size_t> order) {
    ReplicaSamples all;
    ProportionCounter c;
    for (auto i : order) {
      all.merge(parts[i]);
      c.merge(counts[i]);
    }
    ExperimentReport rep;
    const auto v = all.values();
    const auto m = mean_estimate(v);
    rep.add("mean", m.mean, m.ci_lo, m.ci_hi, m.count);
    rep.add("positive", static_cast<double>(c.successes) / c.trials, c.trials);
    return rep.to_json();
  };
  std::vector<std::size_t> order{0, 1, 2, 3, 4, 5, 6};
  const auto base = reduce(order);
  std::mt19937 g(3);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(order.begin(), order.end(), g);
    CHECK(reduce(order) == base);
  }
}
