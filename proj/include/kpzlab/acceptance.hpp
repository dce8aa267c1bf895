#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kpzlab/experiments.hpp"
#include "kpzlab/report.hpp"

namespace kpzlab {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string line;  ///< one-line summary: id, PASS/FAIL, checked statistics
  ExperimentReport report;
};

/// A1..A5 for "quick", A1..A13 for "full".
std::vector<std::string> criterion_ids(std::string_view profile);

/// Runs one criterion at its pinned settings.
CriterionResult run_criterion(std::string_view id, unsigned threads);

/// The acceptance-suite experiment: every selected criterion merged into one report.
ExperimentReport run_acceptance_report(const RunConfig& config);

}  // namespace kpzlab
