#pragma once

// Serialization of results for the command-line front end: fixed-format CSV
// tables, JSON reports and cutoff grids.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pfmass/asymptotics.hpp"

namespace pfmass {

using Json = nlohmann::ordered_json;

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string command;
  Json parameters = Json::object();
  Table table;
  Json summary = Json::object();
  bool converged = true;
};

enum class OutputFormat { csv, json };

OutputFormat parse_format(std::string_view name);

/// Scientific notation with 12 significant digits, independent of locale:
/// 6.93147180560e-01. NaN and infinities print as nan, inf, -inf.
std::string format_double(double v);

std::string to_csv(const Table& table);
Json to_json(const Report& report);
/// CSV table or pretty-printed JSON, newline terminated.
std::string render(const Report& report, OutputFormat format);

/// Header of the sweep CSV:
/// lambda,kappa,b1,...,b6,a2,a2_sqrt_scaled,s1,...,s4,appB_residual,err_flags
const std::vector<std::string>& sweep_csv_columns();
Report sweep_report(const SweepTable& table, const QuadratureSpec& spec);

/// Cutoff grids: "min:max:geometric:count", "min:max:linear:count" or a
/// comma-separated list.
std::vector<double> parse_grid(std::string_view text);

/// "lambda:kappa,lambda:kappa,..." pairs.
std::vector<CutoffWindow> parse_windows(std::string_view text);

}  // namespace pfmass
