#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "kpzlab/experiments.hpp"

using namespace kpzlab;

namespace {

struct Options {
  std::map<std::string, std::string> flags;
  std::string config_file;
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
  bool print_config = false;
  bool timing = false;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError(path + ":" + std::to_string(number) + ": expected key = value");
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    out[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return out;
}

void print_config(const ExperimentDef& def, const RunConfig& cfg) {
  std::cout << "# " << def.name << ": " << def.help << "\n";
  for (const auto& p : def.params) {
    std::cout << p.key << " = " << cfg.values.at(p.key) << "  # " << p.help << "\n";
  }
}

int execute(const ExperimentDef& def, const Options& opt) {
  std::map<std::string, std::string> merged;
  if (!opt.config_file.empty()) merged = read_config_file(opt.config_file);
  for (const auto& [k, v] : opt.flags) merged[k] = v;
  const auto cfg = make_config(def, merged, opt.threads);
  if (opt.print_config) {
    print_config(def, cfg);
    return 0;
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto report = run_experiment(cfg);
  if (opt.timing) {
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  if (opt.out.empty()) {
    if (opt.format == "json") {
      std::cout << report.to_json();
    } else if (opt.format == "csv") {
      std::cout << report.stats_csv();
    } else {
      std::cout << report.to_text();
    }
  } else {
    const std::filesystem::path dir(opt.out);
    std::filesystem::create_directories(dir);
    if (opt.format == "json" || opt.format == "text") {
      std::ofstream(dir / "report.json") << report.to_json();
    }
    report.write_csv(dir);
    std::cout << report.to_text();
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo lab for Brownian last passage percolation"};
  app.require_subcommand(1);
  Options opt;
  opt.threads = default_threads();
  const ExperimentDef* chosen = nullptr;

  for (const auto& def : experiments()) {
    auto* sub = app.add_subcommand(def.name, def.help);
    for (const auto& p : def.params) {
      sub->add_option_function<std::string>(
          "--" + p.key, [&opt, key = p.key](const std::string& v) { opt.flags[key] = v; },
          p.help + " (default " + (p.default_value.empty() ? "\"\"" : p.default_value) + ")");
    }
    sub->add_option("--config", opt.config_file, "flat key = value file; flags override it");
    sub->add_option("--out", opt.out, "output directory for report.json and CSV files");
    sub->add_option("--format", opt.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--threads", opt.threads, "worker threads (default KPZLAB_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--print-config", opt.print_config, "print the effective configuration and exit");
    sub->add_flag("--timing", opt.timing, "record wall-clock time in the report");
    sub->callback([&chosen, &def] { chosen = &def; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return execute(*chosen, opt);
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
