#include <doctest.h>

#include "kpzlab/acceptance.hpp"
#include "kpzlab/experiments.hpp"

using namespace kpzlab;

TEST_CASE("config validation happens before any compute") {
  const auto& def = find_experiment("twin-peaks");
  CHECK_THROWS_AS(make_config(def, {{"nope", "1"}}), DomainError);
  CHECK_THROWS_AS(make_config(def, {{"n", "1.5"}}), DomainError);
  CHECK_THROWS_AS(make_config(def, {{"sigmas", "0.1,,0.2"}}), DomainError);
  CHECK_THROWS_AS(make_config(def, {{"refine", "maybe"}}), DomainError);
  const auto c = make_config(def, {{"n", "64"}, {"sigmas", "0.1, 0.3"}});
  CHECK(c.small_int("n") == 64);
  CHECK(c.reals("sigmas") == std::vector<double>{0.1, 0.3});
  CHECK(c.values.at("n") == "64");
  CHECK_THROWS_AS(find_experiment("nope"), DomainError);
}

TEST_CASE("every experiment's defaults parse") {
  for (const auto& def : experiments()) CHECK_NOTHROW(make_config(def, {}));
  CHECK(experiments().size() == 14);
}

TEST_CASE("report echoes the config and repeats exactly") {
  const auto c = make_config(find_experiment("steadiness"), {{"n", "20"}, {"replicas", "5"}, {"seed", "3"}});
  const auto a = run_experiment(c);
  CHECK(a.experiment == "steadiness");
  CHECK(a.config.at("seed") == "3");
  CHECK(a.to_json() == run_experiment(c).to_json());
  auto c4 = c;
  c4.threads = 4;
  CHECK(run_experiment(c4).to_json() == a.to_json());
}

TEST_CASE("refinement mode reports a shift per statistic") {
  const auto c = make_config(find_experiment("weight"), {{"n", "8"}, {"replicas", "4"}, {"refine", "true"}});
  const auto r = run_experiment(c);
  const auto* base = r.find("weight_mean");
  const auto* shift = r.find("refine_shift.weight_mean");
  REQUIRE(base != nullptr);
  REQUIRE(shift != nullptr);
  CHECK(std::isfinite(shift->value));
}

TEST_CASE("experiment fields are anchored on the coarse grid") {
  const auto fine = experiment_field(3, -0.37, 2.2, 0.1, 1, 0, 2);
  const auto coarse = fine.subsample(2);
  CHECK(coarse.step() == doctest::Approx(0.1));
  CHECK(coarse.x_min() == doctest::Approx(-0.4));
  CHECK(coarse.x_max() >= 2.2 - 1e-12);
  CHECK(coarse.on_grid(0.0));
  CHECK(fine.on_grid(0.05));
}

TEST_CASE("criterion registry") {
  CHECK(criterion_ids("quick").size() == 5);
  CHECK(criterion_ids("full").size() == 13);
  CHECK_THROWS_AS(criterion_ids("slow"), DomainError);
  const auto a1 = run_criterion("A1", 1);
  CHECK(a1.pass);
  CHECK(a1.line.rfind("A1  PASS", 0) == 0);
}
