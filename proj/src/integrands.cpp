#include "pfmass/integrands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace pfmass {

namespace {

constexpr std::array<std::string_view, 14> kTermNames = {"B1", "B2", "B3", "B4", "B5", "B6", "E1",
                                                         "E2", "E3", "E4", "E5", "T1res", "T2res", "T3res"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(TermId id) { return kTermNames[static_cast<std::size_t>(id)]; }

TermId parse_term(std::string_view name) {
  for (std::size_t i = 0; i < kTermNames.size(); ++i) {
    if (iequals(name, kTermNames[i])) return static_cast<TermId>(i);
  }
  throw std::invalid_argument("unknown term '" + std::string(name) + "'");
}

TermId b_term(int index) {
  if (index < 1 || index > 6) throw std::invalid_argument("b-term index must be in 1..6, got " + std::to_string(index));
  return kBTerms[static_cast<std::size_t>(index - 1)];
}

bool is_b_term(TermId id) { return static_cast<int>(id) <= static_cast<int>(TermId::B6); }

bool is_e_term(TermId id) {
  return static_cast<int>(id) >= static_cast<int>(TermId::E1) && static_cast<int>(id) <= static_cast<int>(TermId::E5);
}

int b_index(TermId id) {
  if (!is_b_term(id)) throw std::invalid_argument("not a b-term: " + std::string(to_string(id)));
  return static_cast<int>(id) + 1;
}

// r L(r) = 1/(r/2 + 1) is used throughout so the integrands stay finite at r = 0.
double polar_integrand(TermId j, const PolarPoint& p) {
  const double r1 = p.r1;
  const double r2 = p.r2;
  const double X = p.X;
  const double rl1 = 1.0 / (0.5 * r1 + 1.0);
  const double rl2 = 1.0 / (0.5 * r2 + 1.0);
  const double q = 0.5 * (r1 * r1 + 2.0 * r1 * r2 * X + r2 * r2);
  const double F = 1.0 / (q + r1 + r2);
  const double even = 1.0 + X * X;
  const double odd = X * (X * X - 1.0);
  switch (j) {
    case TermId::B1:
      return -kPi * even * (r2 * rl1 + r1 * rl2) * F;
    case TermId::B2:
      return kPi * r1 * r2 * even * F * F * F * q;
    case TermId::B3:
      return kPi * odd * r1 * r2 * (r2 * rl1 + r1 * rl2) * F * F;
    case TermId::B4:
      return -kPi * even * rl1 * rl2;
    case TermId::B5:
      return kPi * r1 * r2 * (1.0 - X * X) * (rl1 * rl1 + rl2 * rl2) * F;
    case TermId::B6:
      return kPi * odd * r1 * r2 * rl1 * rl2 * F;
    default:
      throw std::invalid_argument("polar_integrand: not a b-term: " + std::string(to_string(j)));
  }
}

double b_kernel(TermId j, const PolarPoint& p, const CutoffWindow& w) {
  const auto in_shell = [&](double r) { return r >= w.kappa() && r <= w.lambda(); };
  if (!in_shell(p.r1) || !in_shell(p.r2) || !(p.X >= -1.0 && p.X <= 1.0)) {
    throw DomainError("b_kernel: point (r1=" + std::to_string(p.r1) + ", r2=" + std::to_string(p.r2) +
                      ", X=" + std::to_string(p.X) + ") outside the integration domain");
  }
  if (p.r1 + p.r2 == 0.0) throw DomainError("b_kernel: degenerate point r1 = r2 = 0");
  return polar_integrand(j, p);
}

std::array<double, 5> e_terms(const CartesianPair& c, const ProjectorContractions& q) {
  const auto d = cartesian_denominators(c);
  const double w12 = photon_weight(norm(c.k1)) * photon_weight(norm(c.k2));
  const Vec3 sum{c.k1[0] + c.k2[0], c.k1[1] + c.k2[1], c.k1[2] + c.k2[2]};
  const double sum2 = dot(sum, sum);
  const double e12 = d.E12inv;
  const double e1 = d.E1inv;
  const double e2 = d.E2inv;
  return {
      -w12 * e12 * (e1 + e2) * q.trQQ,
      w12 * 0.25 * e12 * e12 * e12 * sum2 * 2.0 * q.trQQ,
      w12 * e12 * e12 * (e1 + e2) * q.bilinearQQ,
      -w12 * e1 * e2 * q.trQQ,
      w12 * e12 * (e1 * e1 * q.quad1 + e2 * e2 * q.quad2) + w12 * e12 * e1 * e2 * q.bilinearQQ,
  };
}

double e_term_kernel(TermId j, const CartesianPair& c, const CutoffWindow& w) {
  if (!is_e_term(j)) throw std::invalid_argument("e_term_kernel: not an E-term: " + std::string(to_string(j)));
  for (const Vec3* k : {&c.k1, &c.k2}) {
    const double n = norm(*k);
    if (n < w.kappa() || n > w.lambda() || n == 0.0) {
      throw DomainError("e_term_kernel: |k| = " + std::to_string(n) + " outside the shell [" +
                        std::to_string(w.kappa()) + ", " + std::to_string(w.lambda()) + "]");
    }
  }
  const auto terms = e_terms(c, projector_contractions_matrix(c.k1, c.k2));
  return terms[static_cast<std::size_t>(static_cast<int>(j) - static_cast<int>(TermId::E1))];
}

double t_r(double r, double X, double lambda) {
  const double rho = rho_and_delta(r, X, lambda).rho;
  return (r * r + 2.0 * r * lambda * X + lambda * lambda) * r * lambda / (rho * rho * rho);
}

RhoPowerIntegrals rho_power_integrals_closed(double X, const CutoffWindow& w) {
  const double lambda = w.lambda();
  const double delta = rho_and_delta(0.0, X, lambda).delta;
  if (!(delta > 0.0)) throw DomainError("closed rho integrals need delta > 0, X=" + std::to_string(X));
  const double sd = std::sqrt(delta);
  const auto at = [&](double r) {
    const double x = r + lambda * X + 1.0;
    const double rho = x * x + delta;
    const double atn = std::atan(x / sd);
    const double p2 = x / (2.0 * delta * rho) + atn / (2.0 * delta * sd);
    const double p3 = x / (4.0 * delta * rho * rho) + 3.0 * x / (8.0 * delta * delta * rho) +
                      3.0 * atn / (8.0 * delta * delta * sd);
    return std::array<double, 3>{p2, p3, 1.0 / (rho * rho)};
  };
  const auto hi = at(lambda);
  const auto lo = at(w.kappa());
  const double i2 = hi[0] - lo[0];
  const double i3 = hi[1] - lo[1];
  // int r/rho^3 = -1/4 [1/rho^2] - (lambda X + 1) int 1/rho^3
  const double r3 = -0.25 * (hi[2] - lo[2]) - (lambda * X + 1.0) * i3;
  return {i2, i3, r3};
}

IntegralResult residual_t(TermId j, double X, const CutoffWindow& w, const QuadratureSpec& spec,
                          ResidualMethod method) {
  const double lambda = w.lambda();
  const double kappa = w.kappa();
  const double delta = rho_and_delta(0.0, X, lambda).delta;
  if (!(delta > 0.0)) {
    throw DomainError("residual_t: delta = " + std::to_string(delta) + " <= 0 at X=" + std::to_string(X) +
                      ", lambda=" + std::to_string(lambda));
  }
  const auto rho = [&](double r) { return rho_and_delta(r, X, lambda).rho; };
  const auto bracket = [&](auto&& g) { return g(lambda) - g(kappa); };
  if (w.empty()) return {};

  const double r_min = -lambda * X - 1.0;
  const auto bps = radial_breakpoints(kappa, lambda, {r_min});

  switch (j) {
    case TermId::T1res: {
      if (method == ResidualMethod::closed_form) {
        const auto c = rho_power_integrals_closed(X, w);
        return {-2.0 * lambda * c.inv_rho2 + 4.0 * lambda * c.r_over_rho3 + 2.0 * lambda * lambda * c.inv_rho3, 0.0, 0,
                true};
      }
      return integrate_adaptive(
          [&](double r) {
            const double p = rho(r);
            const double p3 = p * p * p;
            return -2.0 * lambda / (p * p) + 4.0 * lambda * r / p3 + 2.0 * lambda * lambda / p3;
          },
          bps, spec);
    }
    case TermId::T2res: {
      const double boundary = -0.5 * lambda * bracket([&](double r) { return 1.0 / rho(r); });
      IntegralResult inner;
      if (method == ResidualMethod::closed_form) {
        inner.value = rho_power_integrals_closed(X, w).inv_rho2;
      } else {
        inner = integrate_adaptive(
            [&](double r) {
              const double p = rho(r);
              return 1.0 / (p * p);
            },
            bps, spec);
      }
      return {boundary - lambda * inner.value, lambda * inner.error_estimate, inner.evaluations, inner.converged};
    }
    case TermId::T3res: {
      const double b = bracket([&](double r) {
        const double p = rho(r);
        return (r + lambda * X + 1.0) / (4.0 * delta) / (p * p);
      });
      return {2.0 * lambda * lambda * lambda * (2.0 * X + 1.0) * (1.0 - X) * b, 0.0, 0, true};
    }
    default:
      throw std::invalid_argument("residual_t: not a residual term: " + std::string(to_string(j)));
  }
}

double b_lambda(double y, double lambda) {
  const double shift = y - 1.0 / (2.0 * lambda);
  const double c = (2.0 * lambda + 3.0) * (2.0 * lambda - 1.0) / (4.0 * lambda * lambda);
  const double denom = shift * shift - c;
  const double scale = std::max(shift * shift, std::abs(c));
  if (std::abs(denom) < 1e-6 * scale) {
    throw PoleError("b_Lambda: y=" + std::to_string(y) + " within 1e-6 of a pole at lambda=" + std::to_string(lambda));
  }
  const double num = (3.0 / lambda) * (1.0 + 2.0 / lambda) * (y + (2.0 * lambda + 3.0) / (2.0 * lambda + 4.0));
  return num / denom;
}

double a_lambda(double y, double lambda) { return 2.0 * y + 6.0 / lambda + b_lambda(y, lambda); }

double k_poly(double y, const CutoffWindow& w) {
  const double L = w.lambda();
  const double k = w.kappa();
  return (-2.0 * y * y + y + 1.0) * L * L * L + (1.0 + 4.0 * y) * L * L - 2.0 * L +
         k * ((y * y - 2.0) * L * L + (-2.0 * y - 2.0) * L + 1.0) + k * k * ((1.0 - y) * L + 1.0);
}

LowerBoundValues lower_bound_functions(double y, const CutoffWindow& w) {
  const double lambda = w.lambda();
  if (!(lambda > 1.0) || y < 0.0 || y > 1.0 - 1.0 / lambda) {
    throw DomainError("lower_bound_functions: need 0 <= y <= 1 - 1/lambda, got y=" + std::to_string(y) +
                      ", lambda=" + std::to_string(lambda));
  }
  const double bL = b_lambda(y, lambda);
  return {2.0 * y + 6.0 / lambda + bL, bL, k_poly(y, w)};
}

PositivityCheck tr_positive_check(const CutoffWindow& w, std::size_t n_r, std::size_t n_x) {
  const double lambda = w.lambda();
  PositivityCheck out{std::numeric_limits<double>::infinity(), 0, true};
  const double x_lo = -1.0 + 1.0 / lambda;
  for (std::size_t i = 0; i < n_x; ++i) {
    const double X = n_x == 1 ? x_lo : x_lo + (0.0 - x_lo) * static_cast<double>(i) / static_cast<double>(n_x - 1);
    for (std::size_t k = 0; k < n_r; ++k) {
      const double r = n_r == 1 ? w.kappa()
                                : w.kappa() + (lambda - w.kappa()) * static_cast<double>(k) /
                                                  static_cast<double>(n_r - 1);
      const double v = t_r(r, X, lambda);
      out.min_value = std::min(out.min_value, v);
      ++out.samples;
      if (!(v >= 0.0)) out.all_nonnegative = false;
    }
  }
  return out;
}

PositivityCheck k_positive_check(const CutoffWindow& w, std::size_t n_y) {
  PositivityCheck out{std::numeric_limits<double>::infinity(), 0, true};
  for (std::size_t i = 0; i < n_y; ++i) {
    const double y = n_y == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_y - 1);
    const double v = k_poly(y, w);
    out.min_value = std::min(out.min_value, v);
    ++out.samples;
    if (!(v > 0.0)) out.all_nonnegative = false;
  }
  return out;
}

std::optional<double> k_positive_threshold(double kappa, std::span<const double> lambdas, std::size_t n_y) {
  std::optional<double> threshold;
  for (auto it = lambdas.rbegin(); it != lambdas.rend(); ++it) {
    if (*it < kappa) break;
    if (!k_positive_check(CutoffWindow(*it, kappa), n_y).all_nonnegative) break;
    threshold = *it;
  }
  return threshold;
}

double arctan_bracket(double y, const CutoffWindow& w) {
  const double L = w.lambda();
  const double delta = L * L * (1.0 - y * y) + 2.0 * L * (1.0 + y) - 1.0;
  if (!(delta > 0.0)) throw DomainError("arctan_bracket: delta <= 0 at y=" + std::to_string(y));
  const double sd = std::sqrt(delta);
  return std::atan(((1.0 - y) * L + 1.0) / sd) - std::atan((w.kappa() - L * y + 1.0) / sd);
}

double estimate_delta_infimum(double kappa, std::span<const double> lambdas, std::size_t n_y) {
  double inf = std::numeric_limits<double>::infinity();
  for (double L : lambdas) {
    const CutoffWindow w(L, kappa);
    for (std::size_t i = 0; i < n_y; ++i) {
      const double y = n_y == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_y - 1);
      inf = std::min(inf, arctan_bracket(y, w));
    }
  }
  return inf;
}

}  // namespace pfmass
