#pragma once

// Cutoff sweeps and the large-lambda diagnostics built on them: power-law
// fits, Aitken extrapolation of a2/sqrt(lambda), the direct b2 derivative,
// the decay of the lower-bound residuals, and the mass expansion to order
// alpha^2 with its renormalization-flow bookkeeping.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfmass/quadrature.hpp"

namespace pfmass {

struct SweepRow {
  CutoffWindow window;
  double a1 = 0.0;
  std::array<IntegralResult, 6> b{};
  IntegralResult a2;
  double a2_over_sqrt_lambda = 0.0;
  /// Present for lambda >= 4.
  std::optional<AppendixAIntegrals> appendix_a;
  /// Present for lambda >= 10.
  std::optional<IntegralResult> appendix_b;
  /// Non-convergence and skipped-column markers; empty when all is well.
  std::vector<std::string> flags;

  double lambda() const { return window.lambda(); }
  double kappa() const { return window.kappa(); }
  /// True when no flag other than a *_skipped marker is set.
  bool converged() const;
};

/// Column names accepted by SweepTable::column.
inline constexpr std::array<std::string_view, 16> kSweepColumns = {
    "lambda", "kappa", "b1", "b2", "b3", "b4", "b5", "b6", "a2", "a2_sqrt_scaled",
    "s1",     "s2",    "s3", "s4", "appB_residual", "a1"};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// Value of a named column in row i; NaN when the column was skipped.
  double value(std::string_view column, std::size_t i) const;
  std::vector<double> column(std::string_view name) const;
  std::vector<double> lambdas() const;
  bool converged() const;
};

struct SweepOptions {
  bool appendix_a = true;
  bool appendix_b = true;
};

/// Evaluates one row per window (lambda strictly increasing). Rows run
/// concurrently on spec.workers threads; a failing row records its error in
/// `flags` and the sweep continues.
SweepTable sweep(std::span<const CutoffWindow> windows, const QuadratureSpec& spec, SweepOptions options = {});

/// `count` geometrically spaced cutoffs from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct PowerLawFit {
  double gamma = 0.0;
  double b0 = 0.0;
  double r_squared = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// -1 when the column was negative and fitted in absolute value.
  int sign = 1;
  std::size_t points = 0;
};

/// Least squares of log|value| against log(lambda) over rows with lambda in
/// [window.first, window.second]. Needs at least four rows and a column of
/// one strict sign; otherwise std::invalid_argument naming the row.
PowerLawFit fit_power_law(std::span<const double> lambdas, std::span<const double> values,
                          std::pair<double, double> window);
PowerLawFit fit_power_law(const SweepTable& table, std::string_view column, std::pair<double, double> window);

struct Extrapolation {
  double c_estimate = 0.0;
  double spread = 0.0;
  /// Set when the tail differences alternate in sign or do not shrink; the
  /// estimate is then the raw last value.
  bool oscillating = false;
};

/// Aitken delta-squared on the last three entries of `sequence`.
Extrapolation aitken_tail(std::span<const double> sequence);
/// Aitken limit of the a2/sqrt(lambda) column.
Extrapolation extrapolate_ratio(const SweepTable& table);

/// d b2 / d lambda = 8 pi int dX (1+X^2) int_kappa^lambda dr T_R(r, X).
IntegralResult db2_dlambda(double lambda, double kappa, const QuadratureSpec& spec);

struct DerivativeCrosscheck {
  IntegralResult direct;
  double finite_difference = 0.0;
  /// Quadrature error of the difference quotient plus its truncation
  /// estimate |D(h) - D(h/2)|.
  double finite_difference_error = 0.0;
  double step = 0.0;
  bool agree = false;
};

/// Compares db2_dlambda with central differences of integrate_b_term(B2).
DerivativeCrosscheck db2_crosscheck(double lambda, double kappa, double step, const QuadratureSpec& spec);

struct ResidualDecay {
  double lambda = 0.0;
  IntegralResult residual;
};

/// sqrt(lambda) int_{-1+1/lambda}^0 (1+X^2)(t1+t2+t3) dX for each window.
std::vector<ResidualDecay> appendixB_decay(std::span<const CutoffWindow> windows, const QuadratureSpec& spec,
                                           ResidualMethod method = ResidualMethod::quadrature);
IntegralResult appendixB_residual(const CutoffWindow& w, const QuadratureSpec& spec,
                                  ResidualMethod method = ResidualMethod::quadrature);

/// a1 through 1-D quadrature of its radial integrand
/// (2/3)(4 pi)(2 pi)^-3 4 pi int_kappa^lambda dr / (r/2 + 1).
IntegralResult a1_quadrature(const CutoffWindow& w, const QuadratureSpec& spec);

struct MassExpansion {
  double alpha = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double m_over_meff = 1.0;
  double meff_over_m = 1.0;
  bool converged = true;
};

/// m/m_eff = 1 - alpha a1 - alpha^2 a2, and its series inverse truncated at
/// alpha^2: 1 + alpha a1 + alpha^2 (a1^2 + a2).
MassExpansion effective_mass(double alpha, double a1, double a2);
MassExpansion effective_mass(double alpha, const CutoffWindow& w, const QuadratureSpec& spec);

struct FlowSchedule {
  double bare_mass = 0.0;
  double b1 = 0.0;
};

/// Bare mass m = cutoff^{-gamma/(1-gamma)} b1^{1/(1-gamma)} with b1 = m_star/b0,
/// which keeps b0 (cutoff/m)^gamma m = m_star. gamma must lie in (0, 1).
FlowSchedule flow_schedule(const PowerLawFit& fit, double m_star, double cutoff);

}  // namespace pfmass
