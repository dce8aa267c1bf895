#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kpzlab {

enum class Comparison { le, lt, ge, gt, within };

/// One acceptance threshold. `within` means lo <= value <= hi.
struct AcceptanceRule {
  std::string id;
  Comparison cmp = Comparison::le;
  double lo = 0.0;
  double hi = 0.0;
  std::string summary;

  [[nodiscard]] bool passes(double value) const noexcept;
  [[nodiscard]] std::string describe() const;
};

/// Every acceptance threshold used anywhere, keyed by rule id.
const std::vector<AcceptanceRule>& acceptance_rules();
const AcceptanceRule& acceptance_rule(std::string_view id);

struct StatRecord {
  std::string name;
  double value = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  std::size_t count = 0;
  std::string rule;  ///< empty when the statistic is descriptive
  std::optional<bool> pass;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

class ExperimentReport {
 public:
  std::string experiment;
  std::map<std::string, std::string> config;
  std::vector<StatRecord> stats;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  std::optional<double> wall_clock_seconds;

  /// Descriptive statistic.
  StatRecord& add(std::string name, double value, std::size_t count = 0);
  StatRecord& add(std::string name, double value, double ci_lo, double ci_hi, std::size_t count);
  /// Statistic checked against the named acceptance rule.
  StatRecord& check(std::string name, double value, std::string_view rule_id, std::size_t count = 0);

  [[nodiscard]] const StatRecord* find(std::string_view name) const;
  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] std::size_t checked_count() const;

  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::string stats_csv() const;
  /// One CSV per table plus stats.csv, written into `dir`.
  void write_csv(const std::filesystem::path& dir) const;
};

std::string table_csv(const Table& t);

}  // namespace kpzlab
