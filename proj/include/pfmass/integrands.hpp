#pragma once

// Integrands of the second-order mass coefficient: the six polar terms b1..b6,
// the five Cartesian matrix-element terms E1..E5, the residuals t1..t3 of the
// b2 lower-bound argument and the auxiliary functions a_Lambda, b_Lambda, K,
// T_R used there.

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "pfmass/adaptive.hpp"
#include "pfmass/kernels.hpp"

namespace pfmass {

enum class TermId { B1, B2, B3, B4, B5, B6, E1, E2, E3, E4, E5, T1res, T2res, T3res };

inline constexpr std::array<TermId, 6> kBTerms = {TermId::B1, TermId::B2, TermId::B3,
                                                  TermId::B4, TermId::B5, TermId::B6};
inline constexpr std::array<TermId, 5> kETerms = {TermId::E1, TermId::E2, TermId::E3, TermId::E4, TermId::E5};

std::string_view to_string(TermId id);
/// Parses "B1".."T3res" (case-insensitive); throws std::invalid_argument.
TermId parse_term(std::string_view name);
/// B-term by its 1-based index.
TermId b_term(int index);
bool is_b_term(TermId id);
bool is_e_term(TermId id);
int b_index(TermId id);

/// Full integrand of b_j at p, measure and angular factor included. No
/// domain checks; finite whenever r1 + r2 > 0.
double polar_integrand(TermId j, const PolarPoint& p);

/// Checked form of polar_integrand: kappa <= r_j <= lambda, |X| <= 1 and
/// r1 + r2 > 0, otherwise DomainError.
double b_kernel(TermId j, const PolarPoint& p, const CutoffWindow& w);

/// Photon weight phi^2/(2 omega) = (2 pi)^{-3} / (2 |k|) on the shell.
inline double photon_weight(double k) {
  constexpr double inv_2pi3 = 1.0 / (8.0 * kPi * kPi * kPi);
  return inv_2pi3 / (2.0 * k);
}

/// All five E-terms at once, each multiplied by w1 w2, from a given set of
/// projector contractions. Used by the Cartesian sampler.
std::array<double, 5> e_terms(const CartesianPair& c, const ProjectorContractions& q);

/// E-term j at c, contractions computed by explicit matrix products. Throws
/// DomainError when either momentum lies outside kappa <= |k| <= lambda.
double e_term_kernel(TermId j, const CartesianPair& c, const CutoffWindow& w);

enum class ResidualMethod { quadrature, closed_form };

/// Residual t_j(lambda) at fixed X for j in T1res..T3res. Requires
/// delta(X) > 0; otherwise DomainError.
IntegralResult residual_t(TermId j, double X, const CutoffWindow& w, const QuadratureSpec& spec,
                          ResidualMethod method = ResidualMethod::quadrature);

/// Integrals of rho^{-2} and rho^{-3} over r in [kappa, lambda] at fixed X via
/// the arctan reduction formula.
struct RhoPowerIntegrals {
  double inv_rho2;
  double inv_rho3;
  double r_over_rho3;
};
RhoPowerIntegrals rho_power_integrals_closed(double X, const CutoffWindow& w);

/// T_R(r) = rho^{-3} (r^2 + 2 r lambda X + lambda^2) r lambda.
double t_r(double r, double X, double lambda);

/// Raised when b_Lambda is requested too close to a pole of its denominator.
class PoleError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct LowerBoundValues {
  double aL;
  double bL;
  double Kpoly;
};

double b_lambda(double y, double lambda);
double a_lambda(double y, double lambda);
/// K(y) = (-2y^2+y+1) L^3 + (1+4y) L^2 - 2L + kappa((y^2-2)L^2 + (-2y-2)L + 1)
///        + kappa^2((1-y)L + 1).
double k_poly(double y, const CutoffWindow& w);

/// a_Lambda, b_Lambda and K at y. Throws DomainError outside 0 <= y <= 1 - 1/lambda
/// and PoleError close to a pole of b_Lambda.
LowerBoundValues lower_bound_functions(double y, const CutoffWindow& w);

struct PositivityCheck {
  double min_value;
  std::size_t samples;
  bool all_nonnegative;
};

/// Samples T_R on an n_r x n_x grid of r in [kappa, lambda] and
/// X in [-1 + 1/lambda, 0].
PositivityCheck tr_positive_check(const CutoffWindow& w, std::size_t n_r, std::size_t n_x);

/// Minimum of K over y in [0,1] on an evenly spaced grid.
PositivityCheck k_positive_check(const CutoffWindow& w, std::size_t n_y);

/// Smallest lambda on the grid `lambdas` from which K stays positive over
/// y in [0,1] for every larger grid value; nullopt when never.
std::optional<double> k_positive_threshold(double kappa, std::span<const double> lambdas, std::size_t n_y);

/// arctan((r - lambda y + 1)/sqrt(delta)) between r = kappa and r = lambda,
/// with X = -y.
double arctan_bracket(double y, const CutoffWindow& w);

/// Empirical infimum of arctan_bracket over the given lambdas and y-grid.
double estimate_delta_infimum(double kappa, std::span<const double> lambdas, std::size_t n_y);

}  // namespace pfmass
