#include "fedprice/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fedprice/user_game.hpp"

namespace fedprice {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError(key + " is missing");
  if (!j.at(key).is_number()) throw InputError(key + " must be a number");
  return j.at(key).get<double>();
}

std::vector<double> number_array(const json& j, const std::string& key, const std::string& name) {
  if (!j.contains(key)) throw InputError(name + " is missing");
  const json& a = j.at(key);
  if (!a.is_array()) throw InputError(name + " must be an array");
  std::vector<double> out;
  for (const json& v : a) {
    if (!v.is_number()) throw InputError(name + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  throw InputError("format must be \"text\" or \"csv\"");
}

std::string table_extension(ReportFormat format) {
  return format == ReportFormat::Csv ? ".csv" : ".txt";
}

ScenarioConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("scenario must be a JSON object");

  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  if (!j.contains("user_types") || !j.at("user_types").is_object()) {
    throw InputError("user_types is missing");
  }
  const json& ut = j.at("user_types");
  const std::vector<double> theta = number_array(ut, "theta", "user_types.theta");
  const std::vector<double> count = number_array(ut, "count", "user_types.count");
  if (theta.size() != count.size()) {
    throw InputError("user_types.count must have one entry per user_types.theta");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (count[k] != std::floor(count[k]) || count[k] < 1 || count[k] > 1e9) {
      throw InputError("user_types.count must be positive integers");
    }
    s.types.push_back(UserType{theta[k], static_cast<int>(count[k])});
  }
  s.congestion = number_field(j, "beta");
  s.operator_cost = number_field(j, "gamma");
  s.reward_weight = number_field(j, "xi");
  s.d_max = number_field(j, "d_max");
  s.price_cap = number_field(j, "price_cap");

  const bool has_usage = j.contains("background_usage");
  const bool has_trace = j.contains("trace");
  if (has_usage == has_trace) {
    throw InputError("exactly one of background_usage and trace must be given");
  }
  if (has_usage) {
    s.background = number_array(j, "background_usage", "background_usage");
  } else {
    const json& tr = j.at("trace");
    if (!tr.is_object() || !tr.contains("path") || !tr.at("path").is_string()) {
      throw InputError("trace.path is missing");
    }
    cfg.trace_scale = number_field(tr, "scale");
    if (!(cfg.trace_scale > 0.0) || !std::isfinite(cfg.trace_scale)) {
      throw InputError("trace.scale must be positive");
    }
    fs::path p = tr.at("path").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    cfg.trace_path = p;
    s.background = normalize_usage(read_trace(p), cfg.trace_scale);
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("format")) {
    if (!j.at("format").is_string()) throw InputError("format must be a string");
    cfg.format = parse_format(j.at("format").get<std::string>());
  }
  if (j.contains("ndp_grid_points")) {
    if (!j.at("ndp_grid_points").is_number_integer() || j.at("ndp_grid_points").get<long>() < 2) {
      throw InputError("ndp_grid_points must be an integer >= 2");
    }
    cfg.ndp_grid_points = j.at("ndp_grid_points").get<int>();
  }
  s.validate();
  return cfg;
}

ScenarioConfig load_config(const fs::path& file) {
  return parse_config(slurp(file), file.parent_path());
}

Scenario load_scenario(const fs::path& file) { return load_config(file).scenario; }

std::vector<double> read_trace(const fs::path& file) {
  std::istringstream in(slurp(file));
  std::string line;
  if (!std::getline(in, line)) throw InputError("trace: file is empty");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 2 || trim(header[0]) != "hour" || trim(header[1]) != "usage") {
    throw InputError("trace: header must be \"hour,usage\"");
  }
  std::map<long, std::pair<double, int>> sums;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 2) throw InputError("trace: line " + std::to_string(line_no) + " needs 2 fields");
    long hour = 0;
    double usage = 0.0;
    try {
      std::size_t used = 0;
      hour = std::stol(trim(f[0]), &used);
      if (used != trim(f[0]).size()) throw std::invalid_argument("hour");
      usage = std::stod(trim(f[1]), &used);
      if (used != trim(f[1]).size()) throw std::invalid_argument("usage");
    } catch (const std::exception&) {
      throw InputError("trace: line " + std::to_string(line_no) + " is not numeric");
    }
    if (hour < 0) throw InputError("trace: hour must be nonnegative");
    if (!(usage >= 0.0) || !std::isfinite(usage)) throw InputError("trace: usage must be nonnegative");
    auto& [sum, n] = sums[hour];
    sum += usage;
    ++n;
  }
  if (sums.empty()) throw InputError("trace: no data rows");
  std::vector<double> out;
  long expected = 0;
  for (const auto& [hour, acc] : sums) {
    if (hour != expected) throw InputError("trace: hours must cover 0.." + std::to_string(sums.size() - 1));
    out.push_back(acc.first / acc.second);
    ++expected;
  }
  return out;
}

std::vector<double> normalize_usage(const std::vector<double>& raw, double scale) {
  double total = 0.0;
  for (double v : raw) total += v;
  if (!(total > 0.0)) throw InputError("trace: total usage must be positive");
  std::vector<double> out(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) out[t] = scale * raw[t] / total;
  return out;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_number(const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf") return kInfiniteCost;
  if (t == "-inf") return -kInfiniteCost;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: \"" + t + "\"");
  }
  if (used != t.size()) throw InputError("not a number: \"" + t + "\"");
  return v;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("table has no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
  return parse_number(rows.at(row).at(column(name)));
}

void write_table(const Table& table, ReportFormat format, const fs::path& file) {
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << csv_field(cells[k]);
      out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
  } else {
    std::vector<std::size_t> width(table.header.size());
    for (std::size_t k = 0; k < width.size(); ++k) width[k] = table.header[k].size();
    for (const auto& r : table.rows) {
      for (std::size_t k = 0; k < r.size() && k < width.size(); ++k) width[k] = std::max(width[k], r[k].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) s += " | ";
        s += cells[k];
        if (k + 1 < cells.size()) s.append(width[k] - cells[k].size(), ' ');
      }
      out << s << '\n';
    };
    line(table.header);
    std::string rule;
    for (std::size_t k = 0; k < width.size(); ++k) {
      if (k) rule += "-+-";
      rule.append(width[k], '-');
    }
    out << rule << '\n';
    for (const auto& r : table.rows) line(r);
  }
  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + file.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + file.string());
}

Table read_table(const fs::path& file, ReportFormat format) {
  std::istringstream in(slurp(file));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    if (format == ReportFormat::Csv) {
      cells = split_csv_line(line);
    } else {
      if (!first && line.find_first_not_of("-+") == std::string::npos) continue;
      std::size_t start = 0;
      while (true) {
        const std::size_t bar = line.find(" | ", start);
        cells.push_back(trim(line.substr(start, bar == std::string::npos ? std::string::npos : bar - start)));
        if (bar == std::string::npos) break;
        start = bar + 3;
      }
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table contract_table(const Scenario& scenario, const SolveReport& report) {
  Table t;
  t.header = {"type", "theta", "count", "data", "reward", "chosen_item", "payoff"};
  for (std::size_t j = 0; j < scenario.num_types(); ++j) {
    const ContractItem item = j < report.contract.items.size() ? report.contract.items[j] : ContractItem{};
    const bool chose = j < report.choices.size() && report.choices[j].has_value();
    const double payoff = j < report.user_payoffs.size() ? report.user_payoffs[j] : 0.0;
    t.rows.push_back({std::to_string(j + 1), format_number(scenario.types[j].theta),
                      std::to_string(scenario.types[j].count), format_number(item.data),
                      format_number(item.reward), chose ? std::to_string(*report.choices[j] + 1) : "none",
                      format_number(payoff)});
  }
  return t;
}

Table slot_table(const Scenario& scenario, const SolveReport& report) {
  Table t;
  t.header = {"slot", "background", "users", "total_usage", "price", "slot_cost", "selected"};
  for (std::size_t s = 0; s < scenario.num_slots(); ++s) {
    const double h = scenario.background[s];
    const double n = report.demand.counts.at(s);
    t.rows.push_back({std::to_string(s + 1), format_number(h), format_number(n), format_number(n + h),
                      format_number(report.prices.prices.at(s)),
                      format_number(network_cost_of_slot(scenario, report.prices, report.demand, s)),
                      n > 0.0 ? "yes" : "no"});
  }
  return t;
}

Table summary_table(const Scenario& scenario, const SolveReport& report,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  Table t;
  t.header = {"field", "value"};
  t.rows = {
      {"threshold", std::to_string(report.threshold)},
      {"participants", std::to_string(report.participants(scenario))},
      {"common_cost", format_number(report.common_cost)},
      {"server_cost", format_number(report.server_cost)},
      {"operator_profit", format_number(report.operator_profit)},
      {"total_user_payoff", format_number(report.total_user_payoff(scenario))},
      {"selected_slots", std::to_string(report.demand.selected_slots().size())},
  };
  for (const auto& [k, v] : extra) t.rows.push_back({k, v});
  return t;
}

Table comparison_table(const Scenario& scenario, const Comparison& comparison) {
  Table t;
  t.header = {"mechanism", "status", "threshold", "server_cost", "operator_profit", "total_user_payoff",
              "ijd_server_cost_reduction_pct", "ijd_profit_growth_pct", "ijd_user_payoff_growth_pct",
              "provenance"};
  const SolveReport* ijd = nullptr;
  for (const MechanismOutcome& m : comparison.mechanisms) {
    if (m.name == "IJD" && m.report) ijd = &*m.report;
  }
  for (const MechanismOutcome& m : comparison.mechanisms) {
    std::vector<std::string> row{m.name, m.report ? "ok" : "error: " + m.error};
    if (!m.report) {
      row.resize(t.header.size(), "-");
      row.back() = comparison.provenance;
      t.rows.push_back(row);
      continue;
    }
    const SolveReport& r = *m.report;
    row.push_back(std::to_string(r.threshold));
    row.push_back(format_number(r.server_cost));
    row.push_back(format_number(r.operator_profit));
    row.push_back(format_number(r.total_user_payoff(scenario)));
    if (ijd) {
      row.push_back(format_number(-percent_change(ijd->server_cost, r.server_cost)));
      row.push_back(format_number(percent_change(ijd->operator_profit, r.operator_profit)));
      row.push_back(format_number(percent_change(ijd->total_user_payoff(scenario), r.total_user_payoff(scenario))));
    } else {
      row.insert(row.end(), 3, "-");
    }
    row.push_back(comparison.provenance);
    t.rows.push_back(row);
  }
  return t;
}

void emit_report(const Scenario& scenario, const SolveReport& report, ReportFormat format,
                 const fs::path& out_dir, const std::vector<std::pair<std::string, std::string>>& extra) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::string ext = table_extension(format);
  write_table(contract_table(scenario, report), format, out_dir / ("contract" + ext));
  write_table(slot_table(scenario, report), format, out_dir / ("slots" + ext));
  write_table(summary_table(scenario, report, extra), format, out_dir / ("summary" + ext));
}

void emit_comparison(const Scenario& scenario, const Comparison& comparison, ReportFormat format,
                     const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_table(comparison_table(scenario, comparison), format, out_dir / ("comparison" + table_extension(format)));
  for (const MechanismOutcome& m : comparison.mechanisms) {
    if (!m.report) continue;
    std::string sub = m.name;
    std::transform(sub.begin(), sub.end(), sub.begin(), [](unsigned char ch) { return std::tolower(ch); });
    emit_report(scenario, *m.report, format, out_dir / sub);
  }
}

}  // namespace fedprice
