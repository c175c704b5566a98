#include "pfmass/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pfmass {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(std::string(what) + ": cannot parse number '" + t + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      c);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      c);
}

Json result_json(const IntegralResult& r) {
  return Json{{"value", std::isfinite(r.value) ? Json(r.value) : Json(nullptr)},
              {"error", r.error_estimate},
              {"evaluations", r.evaluations},
              {"converged", r.converged}};
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("output format must be csv or json, got '" + std::string(name) + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json to_json(const Report& report) {
  Json rows = Json::array();
  for (const auto& row : report.table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < report.table.columns.size(); ++i) {
      obj[report.table.columns[i]] = cell_json(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return Json{{"command", report.command},
              {"converged", report.converged},
              {"parameters", report.parameters},
              {"rows", std::move(rows)},
              {"summary", report.summary}};
}

std::string render(const Report& report, OutputFormat format) {
  if (format == OutputFormat::csv) return to_csv(report.table);
  return to_json(report).dump(2) + "\n";
}

const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols = {"lambda", "kappa", "b1", "b2", "b3", "b4", "b5", "b6",
                                                "a2", "a2_sqrt_scaled", "s1", "s2", "s3", "s4",
                                                "appB_residual", "err_flags"};
  return cols;
}

Report sweep_report(const SweepTable& table, const QuadratureSpec& spec) {
  Report rep;
  rep.command = "sweep";
  rep.table.columns = sweep_csv_columns();
  Json details = Json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& r = table.rows[i];
    std::vector<Cell> cells;
    for (std::size_t c = 0; c + 1 < rep.table.columns.size(); ++c) {
      cells.emplace_back(table.value(rep.table.columns[c], i));
    }
    std::string flags;
    for (const auto& f : r.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    cells.emplace_back(flags.empty() ? std::string("ok") : flags);
    rep.table.rows.push_back(std::move(cells));

    Json d{{"lambda", r.lambda()}, {"kappa", r.kappa()}, {"a1", r.a1}};
    for (std::size_t j = 0; j < 6; ++j) d["b" + std::to_string(j + 1)] = result_json(r.b[j]);
    d["a2"] = result_json(r.a2);
    if (r.appendix_a) {
      Json a = Json::array();
      for (const auto& raw : r.appendix_a->raw) a.push_back(result_json(raw));
      d["appendixA_raw"] = std::move(a);
    }
    if (r.appendix_b) d["appB_residual"] = result_json(*r.appendix_b);
    details.push_back(std::move(d));
    rep.converged = rep.converged && r.converged();
  }
  rep.parameters = Json{{"rel_tol", spec.rel_tol},
                        {"abs_tol", spec.abs_tol},
                        {"max_subdivisions", spec.max_subdivisions},
                        {"split_at_paper_boundary", spec.split_at_paper_boundary}};
  rep.summary = Json{{"rows", std::move(details)}};
  return rep;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 4) {
    const double lo = parse_number(parts[0], "lambda-grid min");
    const double hi = parse_number(parts[1], "lambda-grid max");
    const double count_d = parse_number(parts[3], "lambda-grid count");
    const int count = static_cast<int>(count_d);
    if (count < 1 || count != count_d) throw std::invalid_argument("lambda-grid count must be a positive integer");
    if (parts[2] == "geometric") return geometric_grid(lo, hi, count);
    if (parts[2] == "linear") {
      if (!(hi >= lo)) throw std::invalid_argument("lambda-grid needs min <= max");
      std::vector<double> out;
      for (int i = 0; i < count; ++i) {
        out.push_back(count == 1 ? lo : (i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1)));
      }
      return out;
    }
    throw std::invalid_argument("lambda-grid spacing must be geometric or linear, got '" + std::string(parts[2]) + "'");
  }
  if (parts.size() != 1) throw std::invalid_argument("lambda-grid must be min:max:geometric:count or a list");
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(parse_number(item, "lambda-grid"));
  return out;
}

std::vector<CutoffWindow> parse_windows(std::string_view text) {
  std::vector<CutoffWindow> out;
  for (auto item : split(text, ',')) {
    const auto lk = split(item, ':');
    if (lk.size() != 2) throw std::invalid_argument("windows: expected lambda:kappa, got '" + std::string(item) + "'");
    out.emplace_back(parse_number(lk[0], "windows lambda"), parse_number(lk[1], "windows kappa"));
  }
  return out;
}

}  // namespace pfmass
