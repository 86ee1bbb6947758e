// Scenario files, usage traces, and report tables.
//
// Scenario file (JSON):
//   {
//     "user_types": {"theta": [2, 4], "count": [1000, 1000]},
//     "beta": 1e-4, "gamma": 1e-4, "xi": 5e-10, "d_max": 10, "price_cap": 2000,
//     "background_usage": [ ... ]            // or
//     "trace": {"path": "usage.csv", "scale": 1e5},
//     "seed": 1, "format": "text", "ndp_grid_points": 1000
//   }
// A relative trace path is resolved against the scenario file's directory.
//
// Trace file (CSV): header "hour,usage", one row per observation, hours
// 0..H-1. Rows with the same hour (several days) are averaged, giving H slots.

#ifndef FEDPRICE_SCENARIO_IO_HPP
#define FEDPRICE_SCENARIO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fedprice/benchmarks.hpp"
#include "fedprice/model.hpp"

namespace fedprice {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Text, Csv };

/// "text" or "csv"; throws InputError otherwise.
ReportFormat parse_format(const std::string& name);

struct ScenarioConfig {
  Scenario scenario;
  std::optional<std::filesystem::path> trace_path;
  double trace_scale = 0.0;
  std::uint64_t seed = 1;
  ReportFormat format = ReportFormat::Text;
  int ndp_grid_points = 1000;
};

/// Parses and validates a scenario file. Problems are reported as InputError
/// naming the field; an unreadable file is an IoError.
ScenarioConfig load_config(const std::filesystem::path& file);
Scenario load_scenario(const std::filesystem::path& file);

/// Parses scenario JSON text; `base_dir` resolves relative trace paths.
ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Per-hour average usage from a trace CSV.
std::vector<double> read_trace(const std::filesystem::path& file);

/// `raw` rescaled so that it sums to `scale`.
std::vector<double> normalize_usage(const std::vector<double>& raw, double scale);

/// Fixed rendering of reals: 9 significant digits, "inf" / "-inf".
std::string format_number(double v);
/// Inverse of format_number.
double parse_number(const std::string& s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws InputError if missing.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

void write_table(const Table& table, ReportFormat format, const std::filesystem::path& file);
Table read_table(const std::filesystem::path& file, ReportFormat format);

/// File extension for a format, including the dot.
std::string table_extension(ReportFormat format);

Table contract_table(const Scenario& scenario, const SolveReport& report);
Table slot_table(const Scenario& scenario, const SolveReport& report);
/// Key/value rows; `extra` is appended after the standard fields.
Table summary_table(const Scenario& scenario, const SolveReport& report,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});
Table comparison_table(const Scenario& scenario, const Comparison& comparison);

/// Writes contract, slots and summary tables into `out_dir` (created if
/// needed). Throws IoError when a file cannot be written.
void emit_report(const Scenario& scenario, const SolveReport& report, ReportFormat format,
                 const std::filesystem::path& out_dir,
                 const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Writes the comparison table plus one report set per mechanism
/// (subdirectories ijd/, njo/, ndp/).
void emit_comparison(const Scenario& scenario, const Comparison& comparison, ReportFormat format,
                     const std::filesystem::path& out_dir);

}  // namespace fedprice

#endif  // FEDPRICE_SCENARIO_IO_HPP
