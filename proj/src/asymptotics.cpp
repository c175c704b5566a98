#include "pfmass/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pfmass/parallel.hpp"

namespace pfmass {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lambda_label(double lambda) {
  std::ostringstream os;
  os.precision(6);
  os << lambda;
  return os.str();
}

}  // namespace

double SweepTable::value(std::string_view column, std::size_t i) const {
  const SweepRow& r = rows.at(i);
  if (column == "lambda") return r.lambda();
  if (column == "kappa") return r.kappa();
  if (column.size() == 2 && column[0] == 'b' && column[1] >= '1' && column[1] <= '6') {
    return r.b[static_cast<std::size_t>(column[1] - '1')].value;
  }
  if (column == "a2") return r.a2.value;
  if (column == "a2_sqrt_scaled") return r.a2_over_sqrt_lambda;
  if (column.size() == 2 && column[0] == 's' && column[1] >= '1' && column[1] <= '4') {
    return r.appendix_a ? r.appendix_a->scaled[static_cast<std::size_t>(column[1] - '1')] : kNaN;
  }
  if (column == "appB_residual") return r.appendix_b ? r.appendix_b->value : kNaN;
  if (column == "a1") return r.a1;
  throw std::invalid_argument("unknown sweep column '" + std::string(column) + "'");
}

std::vector<double> SweepTable::column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(value(name, i));
  return out;
}

std::vector<double> SweepTable::lambdas() const { return column("lambda"); }

bool SweepRow::converged() const {
  return std::all_of(flags.begin(), flags.end(), [](const std::string& f) { return f.ends_with("_skipped"); });
}

bool SweepTable::converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged(); });
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw std::invalid_argument("geometric grid needs 0 < min <= max and count >= 1");
  }
  if (count == 1) return {lo};
  std::vector<double> out;
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? hi : lo * std::exp(step * i));
  return out;
}

SweepTable sweep(std::span<const CutoffWindow> windows, const QuadratureSpec& spec, SweepOptions options) {
  spec.validate();
  if (windows.empty()) throw std::invalid_argument("sweep needs at least one window");
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (!(windows[i].lambda() > windows[i - 1].lambda())) {
      throw std::invalid_argument("sweep windows must have strictly increasing lambda (row " + std::to_string(i) + ")");
    }
  }
  SweepTable table;
  table.rows.resize(windows.size());
  QuadratureSpec row_spec = spec;
  row_spec.workers = windows.size() > 1 ? 1u : spec.workers;

  parallel_for(windows.size(), spec.workers, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.window = windows[i];
    const double lambda = row.lambda();
    try {
      row.a1 = a1_closed(row.window);
      const A2Result a2 = a2_polar(row.window, row_spec);
      row.b = a2.b;
      row.a2 = a2.a2;
      row.a2_over_sqrt_lambda = lambda > 0.0 ? a2.a2.value / std::sqrt(lambda) : 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        if (!row.b[j].converged) row.flags.push_back("b" + std::to_string(j + 1) + "_nonconverged");
      }
      if (options.appendix_a) {
        if (lambda >= 4.0) {
          row.appendix_a = appendixA_scaled_integrals(lambda, row_spec);
          if (!row.appendix_a->converged) row.flags.push_back("appA_nonconverged");
        } else {
          row.flags.push_back("appA_skipped");
        }
      }
      if (options.appendix_b) {
        if (lambda >= 10.0) {
          row.appendix_b = appendixB_residual(row.window, row_spec);
          if (!row.appendix_b->converged) row.flags.push_back("appB_nonconverged");
        } else {
          row.flags.push_back("appB_skipped");
        }
      }
    } catch (const std::exception& e) {
      row.flags.push_back(std::string("failed: ") + e.what());
    }
  });
  return table;
}

PowerLawFit fit_power_law(std::span<const double> lambdas, std::span<const double> values,
                          std::pair<double, double> window) {
  if (lambdas.size() != values.size()) throw std::invalid_argument("fit_power_law: column length mismatch");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] >= window.first && lambdas[i] <= window.second) idx.push_back(i);
  }
  if (idx.size() < 4) {
    throw std::invalid_argument("fit_power_law: need at least 4 rows in the window, found " +
                                std::to_string(idx.size()));
  }
  PowerLawFit fit;
  fit.sign = values[idx.front()] < 0.0 ? -1 : 1;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i : idx) {
    const double v = fit.sign * values[i];
    if (!(v > 0.0) || !(lambdas[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law: row " + std::to_string(i) + " (lambda=" + lambda_label(lambdas[i]) +
                                  ") is not of the column's sign");
    }
    const double x = std::log(lambdas[i]);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = static_cast<double>(idx.size());
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  if (!(cxx > 0.0)) throw std::invalid_argument("fit_power_law: window holds a single lambda");
  fit.gamma = cxy / cxx;
  fit.b0 = std::exp((sy - fit.gamma * sx) / n);
  fit.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  fit.lambda_min = lambdas[idx.front()];
  fit.lambda_max = lambdas[idx.back()];
  fit.points = idx.size();
  return fit;
}

PowerLawFit fit_power_law(const SweepTable& table, std::string_view column, std::pair<double, double> window) {
  const auto l = table.lambdas();
  const auto v = table.column(column);
  return fit_power_law(l, v, window);
}

Extrapolation aitken_tail(std::span<const double> sequence) {
  if (sequence.size() < 3) throw std::invalid_argument("Aitken extrapolation needs at least 3 values");
  const std::size_t n = sequence.size();
  const double x0 = sequence[n - 3];
  const double x1 = sequence[n - 2];
  const double x2 = sequence[n - 1];
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  if (d1 == 0.0 && d2 == 0.0) return {x2, 0.0, false};
  const double curvature = d2 - d1;
  if (d1 * d2 <= 0.0 || std::abs(d2) >= std::abs(d1) || curvature == 0.0) {
    return {x2, std::abs(d2), true};
  }
  const double limit = x2 - d2 * d2 / curvature;
  return {limit, std::abs(limit - x2), false};
}

Extrapolation extrapolate_ratio(const SweepTable& table) { return aitken_tail(table.column("a2_sqrt_scaled")); }

IntegralResult db2_dlambda(double lambda, double kappa, const QuadratureSpec& spec) {
  const CutoffWindow w(lambda, kappa);
  spec.validate();
  if (!(lambda > kappa)) throw std::invalid_argument("db2_dlambda needs lambda > kappa");
  QuadratureSpec in_spec = spec;
  in_spec.rel_tol = spec.rel_tol * 0.125;
  in_spec.abs_tol = spec.abs_tol * 0.125;
  const auto x_bps = angular_breakpoints(-1.0, 1.0, lambda, spec.split_at_paper_boundary);
  bool converged = true;
  auto outer = [&](double X) {
    const auto r_bps = radial_breakpoints(kappa, lambda, {-lambda * X - 1.0});
    IntegralResult r = integrate_adaptive([&](double r) { return t_r(r, X, lambda); }, r_bps, in_spec);
    converged = converged && r.converged;
    const double weight = 8.0 * kPi * (1.0 + X * X);
    return detail::Sample{weight * r.value, weight * r.error_estimate, r.evaluations};
  };
  IntegralResult out = integrate_adaptive(outer, x_bps, spec);
  out.converged = out.converged && converged;
  return out;
}

DerivativeCrosscheck db2_crosscheck(double lambda, double kappa, double step, const QuadratureSpec& spec) {
  if (!(step > 0.0) || !(lambda - step > kappa)) {
    throw std::invalid_argument("db2_crosscheck needs 0 < step < lambda - kappa");
  }
  DerivativeCrosscheck out;
  out.step = step;
  out.direct = db2_dlambda(lambda, kappa, spec);
  auto b2 = [&](double l) { return integrate_b_term(TermId::B2, CutoffWindow(l, kappa), spec); };
  const IntegralResult p1 = b2(lambda + step);
  const IntegralResult m1 = b2(lambda - step);
  const IntegralResult p2 = b2(lambda + 0.5 * step);
  const IntegralResult m2 = b2(lambda - 0.5 * step);
  const double coarse = (p1.value - m1.value) / (2.0 * step);
  const double fine = (p2.value - m2.value) / step;
  out.finite_difference = fine;
  out.finite_difference_error = (p2.error_estimate + m2.error_estimate) / step + std::abs(fine - coarse);
  out.agree = std::abs(out.direct.value - fine) <= out.direct.error_estimate + out.finite_difference_error;
  return out;
}

IntegralResult appendixB_residual(const CutoffWindow& w, const QuadratureSpec& spec, ResidualMethod method) {
  const double lambda = w.lambda();
  if (!(lambda >= 10.0)) throw std::invalid_argument("appendixB residual needs lambda >= 10");
  spec.validate();
  QuadratureSpec in_spec = spec;
  in_spec.rel_tol = spec.rel_tol * 0.125;
  in_spec.abs_tol = spec.abs_tol * 0.125;
  const double lo = -1.0 + 1.0 / lambda;
  const auto x_bps = angular_breakpoints(lo, 0.0, lambda, false);
  bool converged = true;
  auto integrand = [&](double X) {
    detail::Sample s{0.0, 0.0, 0};
    for (TermId t : {TermId::T1res, TermId::T2res, TermId::T3res}) {
      const IntegralResult r = residual_t(t, X, w, in_spec, method);
      converged = converged && r.converged;
      s.value += r.value;
      s.error += r.error_estimate;
      s.evaluations += std::max<std::size_t>(r.evaluations, 1);
    }
    const double weight = 1.0 + X * X;
    s.value *= weight;
    s.error *= weight;
    return s;
  };
  IntegralResult out = integrate_adaptive(integrand, x_bps, spec);
  const double root = std::sqrt(lambda);
  out.value *= root;
  out.error_estimate *= root;
  out.converged = out.converged && converged;
  return out;
}

std::vector<ResidualDecay> appendixB_decay(std::span<const CutoffWindow> windows, const QuadratureSpec& spec,
                                           ResidualMethod method) {
  std::vector<ResidualDecay> out(windows.size());
  parallel_for(windows.size(), spec.workers, [&](std::size_t i) {
    out[i] = {windows[i].lambda(), appendixB_residual(windows[i], spec, method)};
  });
  return out;
}

IntegralResult a1_quadrature(const CutoffWindow& w, const QuadratureSpec& spec) {
  constexpr double pre = (2.0 / 3.0) * (4.0 * kPi) / (8.0 * kPi * kPi * kPi) * (4.0 * kPi);
  if (w.empty()) return {};
  const auto bps = radial_breakpoints(w.kappa(), w.lambda());
  IntegralResult r = integrate_adaptive([](double r) { return pre / (0.5 * r + 1.0); }, bps, spec);
  return r;
}

MassExpansion effective_mass(double alpha, double a1, double a2) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  MassExpansion m;
  m.alpha = alpha;
  m.a1 = a1;
  m.a2 = a2;
  m.m_over_meff = 1.0 - alpha * a1 - alpha * alpha * a2;
  m.meff_over_m = 1.0 + alpha * a1 + alpha * alpha * (a1 * a1 + a2);
  return m;
}

MassExpansion effective_mass(double alpha, const CutoffWindow& w, const QuadratureSpec& spec) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  const A2Result a2 = a2_polar(w, spec);
  MassExpansion m = effective_mass(alpha, a1_closed(w), a2.a2.value);
  m.converged = a2.a2.converged;
  return m;
}

FlowSchedule flow_schedule(const PowerLawFit& fit, double m_star, double cutoff) {
  if (!(fit.gamma > 0.0 && fit.gamma < 1.0)) {
    throw std::domain_error("flow schedule needs 0 < gamma < 1 (got " + std::to_string(fit.gamma) +
                            "); the mass flow is not renormalizable in this scheme");
  }
  if (!(m_star > 0.0)) throw std::invalid_argument("m_star must be > 0");
  if (!(fit.b0 > 0.0)) throw std::invalid_argument("amplitude b0 must be > 0");
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be > 0");
  FlowSchedule out;
  out.b1 = m_star / fit.b0;
  const double g = fit.gamma;
  out.bare_mass = std::pow(cutoff, -g / (1.0 - g)) * std::pow(out.b1, 1.0 / (1.0 - g));
  return out;
}

}  // namespace pfmass
