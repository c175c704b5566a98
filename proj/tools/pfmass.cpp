// pfmass: batch front end for the mass-coefficient computations.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfmass/asymptotics.hpp"
#include "pfmass/report.hpp"

namespace {

using namespace pfmass;

constexpr double kRelTol1d = 1e-8;
constexpr double kRelTol3d = 1e-6;

const std::vector<std::string> kCommands = {"a1",    "bterm",      "a2",   "sweep", "scaling",
                                            "bounds", "crosscheck", "meff", "flow"};

struct RunConfig {
  std::string command;
  double lambda = 10.0;
  double kappa = 0.0;
  int j = 0;
  std::string lambda_grid;
  std::string windows = "5:1,10:1,20:2,40:4";
  double alpha = 1.0 / 137.035999;
  double gamma = 0.5;
  double b0 = 1.0;
  double m_star = 1.0;
  std::optional<double> rel_tol;
  double abs_tol = 0.0;
  int max_subdivisions = 400;
  bool no_paper_split = false;
  bool no_appendix = false;
  std::size_t qmc_samples = std::size_t{1} << 16;
  std::uint64_t qmc_seed = 20040117;
  int qmc_replicates = 16;
  double qmc_rel_tol = 1e-3;
  unsigned threads = 1;
  std::string format = "csv";
  std::string output;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

bool uses_3d(const std::string& command) {
  return command == "bterm" || command == "a2" || command == "sweep" || command == "scaling" ||
         command == "crosscheck" || command == "meff";
}

QuadratureSpec make_spec(const RunConfig& c) {
  QuadratureSpec s;
  s.rel_tol = c.rel_tol.value_or(uses_3d(c.command) ? kRelTol3d : kRelTol1d);
  s.abs_tol = c.abs_tol;
  s.max_subdivisions = c.max_subdivisions;
  s.split_at_paper_boundary = !c.no_paper_split;
  s.qmc_samples = c.qmc_samples;
  s.qmc_seed = c.qmc_seed;
  s.qmc_replicates = c.qmc_replicates;
  s.workers = c.threads;
  return s;
}

template <class F>
auto checked(const char* parameter, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw UsageError(std::string(parameter) + ": " + e.what());
  }
}

std::vector<CutoffWindow> grid_windows(const RunConfig& c, const char* fallback) {
  const std::string text = c.lambda_grid.empty() ? fallback : c.lambda_grid;
  return checked("--lambda-grid", [&] {
    std::vector<CutoffWindow> out;
    for (double l : parse_grid(text)) {
      if (!(l > c.kappa)) throw std::invalid_argument("every lambda must exceed kappa");
      out.emplace_back(l, c.kappa);
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (!(out[i].lambda() > out[i - 1].lambda())) throw std::invalid_argument("lambdas must increase");
    }
    return out;
  });
}

Json spec_json(const QuadratureSpec& s) {
  return Json{{"rel_tol", s.rel_tol},
              {"abs_tol", s.abs_tol},
              {"max_subdivisions", s.max_subdivisions},
              {"split_at_paper_boundary", s.split_at_paper_boundary},
              {"qmc_samples", s.qmc_samples},
              {"qmc_seed", s.qmc_seed},
              {"qmc_replicates", s.qmc_replicates}};
}

Cell num(double v) { return v; }
Cell count(std::size_t v) { return static_cast<std::int64_t>(v); }

// Every numeric parameter is checked here, before anything is computed.
struct Prepared {
  QuadratureSpec spec;
  CutoffWindow window;
  std::vector<CutoffWindow> grid;
};

Prepared prepare(const RunConfig& c) {
  Prepared p;
  p.spec = make_spec(c);
  checked("spec", [&] {
    p.spec.validate();
    return 0;
  });
  if (!(c.qmc_rel_tol > 0.0)) throw UsageError("--qmc-rel-tol: must be > 0");
  const std::string& cmd = c.command;
  if (cmd == "a1" || cmd == "bterm" || cmd == "a2" || cmd == "meff") {
    p.window = checked("--lambda/--kappa", [&] { return CutoffWindow(c.lambda, c.kappa); });
  }
  if (cmd == "bterm" && (c.j < 1 || c.j > 6)) throw UsageError("--j: must be in 1..6");
  if (cmd == "meff" && !std::isfinite(c.alpha)) throw UsageError("--alpha: must be finite");
  if (cmd == "sweep" || cmd == "scaling") p.grid = grid_windows(c, "1e2:1e6:geometric:9");
  if (cmd == "bounds") {
    p.grid = grid_windows(c, "1e2:1e5:geometric:4");
    for (const auto& w : p.grid) {
      if (w.lambda() < 10.0) throw UsageError("--lambda-grid: bounds needs lambda >= 10");
    }
  }
  if (cmd == "scaling" && p.grid.size() < 4) throw UsageError("--lambda-grid: scaling needs at least 4 points");
  if (cmd == "crosscheck") p.grid = checked("--windows", [&] { return parse_windows(c.windows); });
  if (cmd == "flow") {
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw UsageError("--gamma: must lie in (0, 1)");
    if (!(c.b0 > 0.0 && std::isfinite(c.b0))) throw UsageError("--b0: must be > 0");
    if (!(c.m_star > 0.0 && std::isfinite(c.m_star))) throw UsageError("--m-star: must be > 0");
    if (!(c.lambda > 0.0 && std::isfinite(c.lambda))) throw UsageError("--lambda: must be > 0");
  }
  return p;
}

Report run_a1(const RunConfig&, const Prepared& p) {
  Report r;
  const IntegralResult q = a1_quadrature(p.window, p.spec);
  r.table.columns = {"lambda", "kappa", "a1", "a1_quadrature", "a1_quadrature_error"};
  r.table.rows.push_back({num(p.window.lambda()), num(p.window.kappa()), num(a1_closed(p.window)), num(q.value),
                          num(q.error_estimate)});
  r.converged = q.converged;
  return r;
}

Report run_bterm(const RunConfig& c, const Prepared& p) {
  Report r;
  const TermId id = b_term(c.j);
  const IntegralResult q = integrate_b_term(id, p.window, p.spec);
  r.table.columns = {"lambda", "kappa", "term", "value", "error", "evaluations", "converged"};
  r.table.rows.push_back({num(p.window.lambda()), num(p.window.kappa()), std::string(to_string(id)), num(q.value),
                          num(q.error_estimate), count(q.evaluations), q.converged});
  if (c.j == 4) {
    const double l = std::log((p.window.lambda() + 2.0) / (p.window.kappa() + 2.0));
    r.summary["closed_form"] = -32.0 * kPi / 3.0 * l * l;
  }
  r.converged = q.converged;
  return r;
}

Report run_a2(const RunConfig&, const Prepared& p) {
  Report r;
  const A2Result a = a2_polar(p.window, p.spec);
  r.table.columns = {"lambda", "kappa", "b1", "b2", "b3", "b4", "b5", "b6", "a2", "a2_error", "a2_sqrt_scaled"};
  std::vector<Cell> row = {num(p.window.lambda()), num(p.window.kappa())};
  for (const auto& b : a.b) row.push_back(num(b.value));
  row.push_back(num(a.a2.value));
  row.push_back(num(a.a2.error_estimate));
  row.push_back(num(a.a2.value / std::sqrt(p.window.lambda())));
  r.table.rows.push_back(std::move(row));
  r.converged = a.a2.converged;
  return r;
}

Report run_sweep(const RunConfig& c, const Prepared& p) {
  const SweepTable t = sweep(p.grid, p.spec, {!c.no_appendix, !c.no_appendix});
  return sweep_report(t, p.spec);
}

Report run_scaling(const RunConfig&, const Prepared& p) {
  Report r;
  const SweepTable t = sweep(p.grid, p.spec, {false, false});
  const double top = p.grid.back().lambda();
  const std::pair<double, double> window{top / 100.0 * (1.0 - 1e-12), top};
  r.table.columns = {"column", "gamma", "b0", "r_squared", "lambda_min", "lambda_max", "sign", "points", "note"};
  for (const char* col : {"b1", "b2", "b3", "b4", "b5", "b6", "a2"}) {
    try {
      const PowerLawFit f = fit_power_law(t, col, window);
      r.table.rows.push_back({std::string(col), num(f.gamma), num(f.b0), num(f.r_squared), num(f.lambda_min),
                              num(f.lambda_max), static_cast<std::int64_t>(f.sign), count(f.points),
                              std::string("ok")});
    } catch (const std::invalid_argument& e) {
      const double nan = std::nan("");
      std::string note = e.what();
      for (char& ch : note) {
        if (ch == ',') ch = ';';
      }
      r.table.rows.push_back({std::string(col), nan, nan, nan, nan, nan, std::int64_t{0}, std::int64_t{0}, note});
    }
  }
  const Extrapolation ex = extrapolate_ratio(t);
  r.summary["a2_sqrt_scaled"] = t.column("a2_sqrt_scaled");
  r.summary["lambdas"] = t.lambdas();
  r.summary["c_estimate"] = ex.c_estimate;
  r.summary["c_spread"] = ex.spread;
  r.summary["oscillating"] = ex.oscillating;
  r.converged = t.converged();
  return r;
}

Report run_bounds(const RunConfig&, const Prepared& p) {
  Report r;
  r.table.columns = {"check", "lambda", "kappa", "value", "pass"};
  bool converged = true;
  std::optional<double> previous_residual;
  for (const auto& w : p.grid) {
    const double l = w.lambda();
    const double k = w.kappa();
    const PositivityCheck tr = tr_positive_check(w, 100, 100);
    r.table.rows.push_back({std::string("tr_min"), l, k, tr.min_value, tr.all_nonnegative});
    const PositivityCheck kp = k_positive_check(w, 1001);
    r.table.rows.push_back({std::string("k_min"), l, k, kp.min_value, kp.min_value > 0.0});
    const double b_end = b_lambda(1.0 - 1.0 / l, l);
    r.table.rows.push_back({std::string("b_lambda_end"), l, k, b_end, std::abs(b_end + 1.5) <= 0.05});
    const IntegralResult d = db2_dlambda(l, k, p.spec);
    const double scaled = std::sqrt(l) * d.value;
    r.table.rows.push_back({std::string("sqrt_lambda_db2"), l, k, scaled, scaled > 0.0});
    const IntegralResult res = appendixB_residual(w, p.spec);
    const bool decays = !previous_residual || std::abs(res.value) < std::abs(*previous_residual);
    r.table.rows.push_back({std::string("appB_residual"), l, k, res.value, decays});
    previous_residual = res.value;
    converged = converged && d.converged && res.converged;
  }
  r.converged = converged;
  return r;
}

Report run_crosscheck(const RunConfig& c, const Prepared& p) {
  Report r;
  QuadratureSpec qmc_spec = p.spec;
  qmc_spec.rel_tol = c.qmc_rel_tol;
  r.table.columns = {"lambda", "kappa", "a2_polar", "a2_polar_error", "a2_qmc", "a2_qmc_error", "ratio",
                     "ratio_error"};
  std::vector<double> ratios;
  bool converged = true;
  for (const auto& w : p.grid) {
    const A2Result polar = a2_polar(w, p.spec);
    const QmcResult qmc = a2_cartesian_qmc(w, qmc_spec);
    const double ratio = qmc.estimate.value / polar.a2.value;
    const double ratio_err = std::abs(ratio) * std::hypot(qmc.estimate.error_estimate / qmc.estimate.value,
                                                          polar.a2.error_estimate / polar.a2.value);
    ratios.push_back(ratio);
    r.table.rows.push_back({w.lambda(), w.kappa(), polar.a2.value, polar.a2.error_estimate, qmc.estimate.value,
                            qmc.estimate.error_estimate, ratio, ratio_err});
    converged = converged && polar.a2.converged && qmc.estimate.converged;
  }
  double mean = 0.0;
  for (double x : ratios) mean += x;
  mean /= static_cast<double>(ratios.size());
  double lo = ratios.front();
  double hi = ratios.front();
  for (double x : ratios) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  r.summary["constant"] = mean;
  r.summary["relative_spread"] = (hi - lo) / std::abs(mean);
  r.summary["two_pi"] = 2.0 * kPi;
  r.converged = converged;
  return r;
}

Report run_meff(const RunConfig& c, const Prepared& p) {
  Report r;
  const MassExpansion m = effective_mass(c.alpha, p.window, p.spec);
  r.table.columns = {"alpha", "lambda", "kappa", "a1", "a2", "m_over_meff", "meff_over_m"};
  r.table.rows.push_back({m.alpha, p.window.lambda(), p.window.kappa(), m.a1, m.a2, m.m_over_meff, m.meff_over_m});
  r.converged = m.converged;
  return r;
}

Report run_flow(const RunConfig& c, const Prepared&) {
  Report r;
  PowerLawFit fit;
  fit.gamma = c.gamma;
  fit.b0 = c.b0;
  const FlowSchedule f = flow_schedule(fit, c.m_star, c.lambda);
  const double check = c.b0 * std::pow(c.lambda / f.bare_mass, c.gamma) * f.bare_mass;
  r.table.columns = {"gamma", "b0", "m_star", "lambda", "b1", "bare_mass", "m_star_check"};
  r.table.rows.push_back({c.gamma, c.b0, c.m_star, c.lambda, f.b1, f.bare_mass, check});
  return r;
}

Report dispatch(const RunConfig& c, const Prepared& p) {
  if (c.command == "a1") return run_a1(c, p);
  if (c.command == "bterm") return run_bterm(c, p);
  if (c.command == "a2") return run_a2(c, p);
  if (c.command == "sweep") return run_sweep(c, p);
  if (c.command == "scaling") return run_scaling(c, p);
  if (c.command == "bounds") return run_bounds(c, p);
  if (c.command == "crosscheck") return run_crosscheck(c, p);
  if (c.command == "meff") return run_meff(c, p);
  return run_flow(c, p);
}

unsigned default_threads() {
  if (const char* env = std::getenv("PFMASS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("PFMASS_THREADS: must be a positive integer");
  }
  return 1;
}

int run(int argc, char** argv) {
  RunConfig c;
  c.threads = default_threads();

  CLI::App app{"Order-alpha^2 effective-mass coefficients of the spinless Pauli-Fierz model.\n"
               "Defaults: rel-tol 1e-8 for 1-D/2-D integrals (a1, bounds, flow), 1e-6 for the 3-D\n"
               "b_j integrals (bterm, a2, sweep, scaling, crosscheck, meff); QMC 2^16 samples x 16\n"
               "replicates. Results are identical for any --threads value.",
               "pfmass"};
  app.set_config("--config", "", "Read options from a file of 'key = value' lines ('#' comments); "
                                 "command-line flags override file values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  app.add_option("command", c.command, "One of: a1 bterm a2 sweep scaling bounds crosscheck meff flow")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--lambda", c.lambda, "UV cutoff lambda = Lambda/m")->capture_default_str();
  app.add_option("--kappa", c.kappa, "IR cutoff kappa/m")->capture_default_str();
  app.add_option("--j", c.j, "Term index 1..6 for bterm");
  app.add_option("--lambda-grid", c.lambda_grid,
                 "Cutoffs as min:max:geometric:count, min:max:linear:count or a comma list "
                 "(sweep/scaling default 1e2:1e6:geometric:9, bounds default 1e2:1e5:geometric:4)");
  app.add_option("--windows", c.windows, "lambda:kappa pairs for crosscheck")->capture_default_str();
  app.add_option("--alpha", c.alpha, "Coupling for meff")->capture_default_str();
  app.add_option("--gamma", c.gamma, "Flow exponent, 0 < gamma < 1")->capture_default_str();
  app.add_option("--b0", c.b0, "Flow prefactor")->capture_default_str();
  app.add_option("--m-star", c.m_star, "Target renormalized mass")->capture_default_str();
  app.add_option("--rel-tol", c.rel_tol, "Relative tolerance (default depends on the command)");
  app.add_option("--abs-tol", c.abs_tol, "Absolute tolerance")->capture_default_str();
  app.add_option("--max-subdivisions", c.max_subdivisions, "Panels per axis")->capture_default_str();
  app.add_flag("--no-paper-split", c.no_paper_split, "Omit the breakpoint at X = -1 + 1/lambda");
  app.add_flag("--no-appendix", c.no_appendix, "Skip the s1..s4 and appB_residual columns in sweep");
  app.add_option("--qmc-samples", c.qmc_samples, "Sobol points per replicate")->capture_default_str();
  app.add_option("--qmc-seed", c.qmc_seed, "Scrambling seed")->capture_default_str();
  app.add_option("--qmc-replicates", c.qmc_replicates, "Independent scrambles")->capture_default_str();
  app.add_option("--qmc-rel-tol", c.qmc_rel_tol, "Target relative standard error of the QMC estimate")
      ->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads (default from PFMASS_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out,--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", c.output, "Write to this file instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (c.command.empty()) throw UsageError("command: missing (one of a1 bterm a2 sweep scaling bounds crosscheck meff flow)");

  const Prepared prepared = prepare(c);
  const OutputFormat format = parse_format(c.format);

  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output, std::ios::out | std::ios::trunc);
    if (!file) throw UsageError("--output: cannot open '" + c.output + "' for writing");
  }

  Report report = dispatch(c, prepared);
  report.command = c.command;
  Json params = Json::object();
  params["command"] = c.command;
  if (c.command != "flow") params["spec"] = spec_json(prepared.spec);
  for (auto& [k, v] : report.parameters.items()) params[k] = v;
  report.parameters = std::move(params);

  const std::string text = render(report, format);
  if (file.is_open()) {
    file << text;
    file.flush();
    if (!file) throw UsageError("--output: write to '" + c.output + "' failed");
  } else {
    std::cout << text;
  }
  if (!report.converged) {
    std::cerr << "pfmass: warning: some integrals did not reach the requested tolerance\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "pfmass: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pfmass: error: " << e.what() << "\n";
    return 1;
  }
}
