// fedprice: solve, compare and verify pricing/contract equilibria.
//
// Exit codes: 0 success, 1 I/O or property failure, 2 invalid input,
// 3 numerical infeasibility.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fedprice/benchmarks.hpp"
#include "fedprice/horizontal.hpp"
#include "fedprice/operator_pricing.hpp"
#include "fedprice/scenario_io.hpp"
#include "verify_suite.hpp"

namespace fs = std::filesystem;
using namespace fedprice;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

std::string provenance_of(const ScenarioConfig& cfg, const fs::path& file) {
  std::string s = "scenario " + file.filename().string() + "; background usage ";
  if (cfg.trace_path) {
    s += "from trace " + cfg.trace_path->filename().string();
  } else {
    s += "given inline";
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> h_fields(const HStatistic& h) {
  return {{"H", format_number(h.value)},
          {"H_server_tolerance", format_number(h.server_tolerance)},
          {"H_operator_ceiling", format_number(h.operator_ceiling)},
          {"H_proviso_holds", h.proviso_holds ? "yes" : "no"}};
}

void solve_vertical(const ScenarioConfig& cfg, const fs::path& out, ReportFormat fmt) {
  const SolveReport r = optimal_operator_solution(cfg.scenario);
  std::vector<std::pair<std::string, std::string>> extra;
  try {
    extra = h_fields(compute_H(cfg.scenario));
  } catch (const NumericalInfeasibility&) {
    extra.push_back({"H", "undefined"});
  }
  emit_report(cfg.scenario, r, fmt, out, extra);
  std::cout << "x* = " << r.threshold << ", c = " << format_number(r.common_cost)
            << ", W_S = " << format_number(r.server_cost) << ", W_O = " << format_number(r.operator_profit) << '\n';
}

void solve_horizontal(const ScenarioConfig& cfg, const fs::path& out, ReportFormat fmt) {
  compute_H(cfg.scenario);  // throws when nobody participates
  const HorizontalVerdict v = check_horizontal_equilibrium(cfg.scenario);
  std::vector<std::pair<std::string, std::string>> extra = h_fields(v.h);
  extra.push_back({"equilibrium_exists", v.exists ? "yes" : "no"});
  extra.push_back({"mutual_best_response", v.mutual_best_response ? "yes" : "no"});
  extra.push_back({"server_gap", format_number(v.server_gap)});
  extra.push_back({"operator_gap", format_number(v.operator_gap)});
  if (v.report) {
    emit_report(cfg.scenario, *v.report, fmt, out, extra);
    std::cout << "horizontal equilibrium exists (H = " << format_number(v.h.value) << ")\n";
    return;
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string());
  Table summary;
  summary.header = {"field", "value"};
  for (const auto& [k, val] : extra) summary.rows.push_back({k, val});
  summary.rows.push_back({"cycle_detected", v.cycle_detected ? "yes" : "no"});
  write_table(summary, fmt, out / ("summary" + table_extension(fmt)));

  Table cycle;
  cycle.header = {"iteration", "server_threshold", "selected_users", "common_cost", "operator_profit", "server_cost"};
  for (const CycleStep& s : v.iterations) {
    cycle.rows.push_back({std::to_string(s.iteration), std::to_string(s.server_threshold),
                          std::to_string(s.selected_users), format_number(s.common_cost),
                          format_number(s.operator_profit), format_number(s.server_cost)});
  }
  write_table(cycle, fmt, out / ("best_response_cycle" + table_extension(fmt)));
  std::cout << "no horizontal equilibrium (H = " << format_number(v.h.value) << ")\n";
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalInfeasibility& e) {
    std::cerr << "numerically infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint contract design and dynamic network pricing solver"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir, format_name;
  std::string structure;
  auto* solve = app.add_subcommand("solve", "Solve one market structure");
  solve->add_option("structure", structure, "vertical, horizontal or tolerant")
      ->required()
      ->check(CLI::IsMember({"vertical", "horizontal", "tolerant"}));
  solve->add_option("--scenario", scenario_file, "Scenario JSON")->required();
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_option("--format", format_name, "text or csv (default: scenario setting)");

  auto* compare = app.add_subcommand("compare", "Compare IJD with the NJO and NDP benchmarks");
  compare->add_option("--scenario", scenario_file, "Scenario JSON")->required();
  compare->add_option("--out", out_dir, "Output directory")->required();
  compare->add_option("--format", format_name, "text or csv (default: scenario setting)");

  int trials = 50;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "Run property checks");
  verify->add_option("--scenario", scenario_file, "Scenario JSON")->required();
  verify->add_option("--trials", trials, "Random instances to check")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "Seed for the random instances");

  std::string scenarios_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Solve and compare every scenario in a directory");
  sweep->add_option("--scenarios", scenarios_dir, "Directory of scenario JSON files")->required();
  sweep->add_option("--out", out_dir, "Output root (default: <scenarios>/results)");
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  auto config_and_format = [&](ReportFormat& fmt) {
    ScenarioConfig cfg = load_config(scenario_file);
    fmt = format_name.empty() ? cfg.format : parse_format(format_name);
    return cfg;
  };

  if (*solve) {
    return run_guarded([&] {
      ReportFormat fmt;
      ScenarioConfig cfg = config_and_format(fmt);
      if (structure == "vertical") {
        solve_vertical(cfg, out_dir, fmt);
      } else if (structure == "horizontal") {
        solve_horizontal(cfg, out_dir, fmt);
      } else {
        cfg.scenario.congestion = 0.0;  // users ignore congestion
        solve_vertical(cfg, out_dir, fmt);
      }
    });
  }

  if (*compare) {
    return run_guarded([&] {
      ReportFormat fmt;
      const ScenarioConfig cfg = config_and_format(fmt);
      const Comparison c = compare_mechanisms(cfg.scenario, provenance_of(cfg, scenario_file));
      emit_comparison(cfg.scenario, c, fmt, out_dir);
      write_table(comparison_table(cfg.scenario, c), ReportFormat::Text, "/dev/stdout");
    });
  }

  if (*verify) {
    int failures = 0;
    const int code = run_guarded([&] {
      const Scenario s = load_scenario(scenario_file);
      failures = tools::run_verification(s, trials, seed, std::cout);
    });
    if (code != 0) return code;
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
    return failures == 0 ? 0 : kExitFailure;
  }

  // sweep
  std::vector<fs::path> files;
  {
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(scenarios_dir, ec)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    if (ec) {
      std::cerr << "invalid input: cannot list " << scenarios_dir << '\n';
      return kExitInput;
    }
  }
  std::sort(files.begin(), files.end());
  const fs::path root = out_dir.empty() ? fs::path(scenarios_dir) / "results" : fs::path(out_dir);
  std::vector<int> codes(files.size(), 0);
  std::vector<std::string> lines(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      std::ostringstream line;
      codes[k] = [&] {
        try {
          const ScenarioConfig cfg = load_config(files[k]);
          const SolveReport r = optimal_operator_solution(cfg.scenario);
          const fs::path dir = root / files[k].stem();
          emit_report(cfg.scenario, r, cfg.format, dir / "vertical");
          const Comparison c = compare_mechanisms(cfg.scenario, provenance_of(cfg, files[k]));
          emit_comparison(cfg.scenario, c, cfg.format, dir / "compare");
          line << "x* = " << r.threshold << ", W_S = " << format_number(r.server_cost)
               << ", W_O = " << format_number(r.operator_profit);
          return 0;
        } catch (const InputError& e) {
          line << "invalid input: " << e.what();
          return kExitInput;
        } catch (const NumericalInfeasibility& e) {
          line << "numerically infeasible: " << e.what();
          return kExitInfeasible;
        } catch (const std::exception& e) {
          line << "error: " << e.what();
          return kExitFailure;
        }
      }();
      lines[k] = line.str();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, std::max<std::size_t>(1, files.size())); ++w) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  int worst = 0;
  for (std::size_t k = 0; k < files.size(); ++k) {
    std::cout << files[k].filename().string() << ": " << lines[k] << '\n';
    if (codes[k] == kExitInput || codes[k] == kExitInfeasible) worst = std::max(worst, codes[k]);
    else if (codes[k] != 0 && worst == 0) worst = codes[k];
  }
  return worst;
}
