#include <doctest.h>

#include <cmath>
#include <random>

#include "pfmass/integrands.hpp"

using namespace pfmass;

namespace {

// Braces of the Cartesian a2 integrand written out from the scalar
// identities for the projector contractions, times the photon weights.
double cartesian_braces(const CartesianPair& c) {
  const double n1 = norm(c.k1);
  const double n2 = norm(c.k2);
  const double k12 = dot(c.k1, c.k2);
  const double s = k12 / (n1 * n2);
  const double e1 = 1.0 / (0.5 * n1 * n1 + n1);
  const double e2 = 1.0 / (0.5 * n2 * n2 + n2);
  const double sum2 = n1 * n1 + 2.0 * k12 + n2 * n2;
  const double e12 = 1.0 / (0.5 * sum2 + n1 + n2);
  const double t = 1.0 + s * s;
  const double braces = -(e1 + e2) * e12 * t + e12 * e12 * e12 * 0.5 * sum2 * t +
                        (e1 + e2) * e12 * e12 * k12 * (s * s - 1.0) - e1 * e2 * t +
                        (n1 * n1 * e1 * e1 + n2 * n2 * e2 * e2) * e12 * (1.0 - s * s) +
                        e1 * e2 * e12 * k12 * (s * s - 1.0);
  const double inv2pi3 = 1.0 / std::pow(2.0 * kPi, 3);
  return braces * (inv2pi3 / (2.0 * n1)) * (inv2pi3 / (2.0 * n2));
}

CartesianPair pair_at(const PolarPoint& p) {
  return {{0.0, 0.0, p.r1}, {p.r2 * std::sqrt(1.0 - p.X * p.X), 0.0, p.r2 * p.X}};
}

}  // namespace

TEST_CASE("term names") {
  CHECK(to_string(TermId::B3) == "B3");
  CHECK(parse_term("t2res") == TermId::T2res);
  CHECK(parse_term("e5") == TermId::E5);
  CHECK_THROWS_AS(parse_term("B7"), std::invalid_argument);
  CHECK(b_term(6) == TermId::B6);
  CHECK_THROWS_AS(b_term(0), std::invalid_argument);
  CHECK(is_b_term(TermId::B1));
  CHECK_FALSE(is_b_term(TermId::E1));
  CHECK(is_e_term(TermId::E3));
  CHECK(b_index(TermId::B4) == 4);
}

TEST_CASE("E-term sum matches the written-out braces") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double scale = std::exp(4.0 * n(gen));
    CartesianPair c{{scale * n(gen), scale * n(gen), scale * n(gen)}, {n(gen), n(gen), n(gen)}};
    const auto terms = e_terms(c, projector_contractions_closed(c.k1, c.k2));
    double sum = 0.0;
    double mag = 0.0;
    for (double t : terms) {
      sum += t;
      mag += std::abs(t);
    }
    CHECK(std::abs(sum - cartesian_braces(c)) <= 1e-12 * mag);
  }
}

TEST_CASE("Cartesian integrand reduces to the polar one") {
  // d^3k1 d^3k2 -> 8 pi^2 r1^2 r2^2 dr1 dr2 dX; the polar form carries pi r1 r2
  // and a (2 pi)^-6 prefactor, leaving a factor 2 pi between the two.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double to_polar = 8.0 * kPi * kPi * std::pow(2.0 * kPi, 6);
  const CutoffWindow w(50.0, 0.0);
  for (int i = 0; i < 300; ++i) {
    const PolarPoint p{50.0 * u(gen) + 1e-3, 50.0 * u(gen) + 1e-3, 2.0 * u(gen) - 1.0};
    const auto c = pair_at(p);
    const double r2r2 = p.r1 * p.r1 * p.r2 * p.r2;
    std::array<double, 5> e{};
    for (int j = 0; j < 5; ++j) e[j] = e_term_kernel(kETerms[j], c, w) * to_polar * r2r2;
    std::array<double, 6> b{};
    for (int j = 0; j < 6; ++j) b[j] = 2.0 * kPi * b_kernel(kBTerms[j], p, w);
    for (int j = 0; j < 4; ++j) CHECK(e[j] == doctest::Approx(b[j]).epsilon(1e-10).scale(1e-12));
    CHECK(e[4] == doctest::Approx(b[4] + b[5]).epsilon(1e-10).scale(1e-12));
  }
}

TEST_CASE("polar kernel symmetries and signs") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double r1 = 100.0 * u(gen);
    const double r2 = 100.0 * u(gen) + 1e-6;
    const double X = 2.0 * u(gen) - 1.0;
    CHECK(polar_integrand(TermId::B3, {r1, r2, 0.0}) == 0.0);
    CHECK(polar_integrand(TermId::B6, {r1, r2, 0.0}) == 0.0);
    CHECK(polar_integrand(TermId::B5, {r1, r2, 1.0}) == 0.0);
    CHECK(polar_integrand(TermId::B5, {r1, r2, -1.0}) == 0.0);
    CHECK(polar_integrand(TermId::B4, {r1, r2, X}) <= 0.0);
    CHECK(polar_integrand(TermId::B2, {r1, r2, X}) >= 0.0);
    CHECK(polar_integrand(TermId::B1, {r1, r2, X}) <= 0.0);
    for (TermId j : kBTerms) {
      CHECK(polar_integrand(j, {r1, r2, X}) == doctest::Approx(polar_integrand(j, {r2, r1, X})).epsilon(1e-13));
    }
  }
}

TEST_CASE("kernel domain errors") {
  const CutoffWindow w(10.0, 1.0);
  CHECK_THROWS_AS(b_kernel(TermId::B1, {0.5, 2.0, 0.0}, w), DomainError);
  CHECK_THROWS_AS(b_kernel(TermId::B1, {2.0, 11.0, 0.0}, w), DomainError);
  CHECK_THROWS_AS(b_kernel(TermId::B1, {2.0, 2.0, 1.5}, w), DomainError);
  CHECK_THROWS_AS(b_kernel(TermId::B1, {0.0, 0.0, 0.0}, CutoffWindow(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(polar_integrand(TermId::E1, {1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(e_term_kernel(TermId::E1, {{0.0, 0.0, 20.0}, {1.0, 1.0, 1.0}}, w), DomainError);
  CHECK_THROWS_AS(e_term_kernel(TermId::B1, {{0.0, 0.0, 2.0}, {1.0, 1.0, 1.0}}, w), std::invalid_argument);
}

TEST_CASE("T_R is nonnegative on the lower-bound range") {
  for (double lambda : {1e2, 1e3, 1e4}) {
    const auto check = tr_positive_check(CutoffWindow(lambda, 0.0), 100, 100);
    CHECK(check.samples == 10000);
    CHECK(check.all_nonnegative);
    CHECK(check.min_value >= 0.0);
  }
  CHECK(t_r(0.0, -0.5, 100.0) == 0.0);
}

TEST_CASE("residual t3 vanishes at X = -1/2") {
  const CutoffWindow w(1e3, 0.0);
  CHECK(residual_t(TermId::T3res, -0.5, w, {}).value == 0.0);
}

TEST_CASE("closed-form rho integrals match quadrature") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  for (double lambda : {10.0, 1e3, 1e5}) {
    for (double kappa : {0.0, 1.0}) {
      const CutoffWindow w(lambda, kappa);
      for (double X : {-1.0 + 1.0 / lambda, -0.9, -0.5, -0.1, 0.0}) {
        for (TermId j : {TermId::T1res, TermId::T2res}) {
          const auto q = residual_t(j, X, w, spec, ResidualMethod::quadrature);
          const auto c = residual_t(j, X, w, spec, ResidualMethod::closed_form);
          CHECK(q.converged);
          CHECK(std::abs(q.value - c.value) <= 1e-8 * std::abs(c.value) + 1e-14);
        }
      }
    }
  }
}

TEST_CASE("residual errors") {
  const CutoffWindow w(100.0, 0.0);
  CHECK_THROWS_AS(residual_t(TermId::T1res, 1.0, w, {}), DomainError);
  CHECK_THROWS_AS(residual_t(TermId::B1, -0.5, w, {}), std::invalid_argument);
}

TEST_CASE("b_Lambda properties") {
  SUBCASE("end value tends to -3/2") {
    for (double lambda : {1e4, 1e5, 1e6}) CHECK(std::abs(b_lambda(1.0 - 1.0 / lambda, lambda) + 1.5) < 0.05);
  }
  SUBCASE("concave on [0, 1 - 1/lambda]") {
    const double lambda = 1e3;
    const int n = 1000;
    const double h = (1.0 - 1.0 / lambda) / n;
    for (int i = 1; i < n; ++i) {
      const double y = i * h;
      CHECK(b_lambda(y + h, lambda) - 2.0 * b_lambda(y, lambda) + b_lambda(y - h, lambda) < 0.0);
    }
  }
  SUBCASE("a_Lambda shift") {
    CHECK(a_lambda(0.3, 50.0) == doctest::Approx(0.6 + 6.0 / 50.0 + b_lambda(0.3, 50.0)));
  }
  SUBCASE("pole detection") {
    const double lambda = 10.0;
    const double c = (2.0 * lambda + 3.0) * (2.0 * lambda - 1.0) / (4.0 * lambda * lambda);
    CHECK_THROWS_AS(b_lambda(1.0 / (2.0 * lambda) + std::sqrt(c), lambda), PoleError);
  }
  SUBCASE("domain of the combined evaluation") {
    const CutoffWindow w(100.0, 0.0);
    CHECK_NOTHROW(lower_bound_functions(0.5, w));
    CHECK_THROWS_AS(lower_bound_functions(-0.1, w), DomainError);
    CHECK_THROWS_AS(lower_bound_functions(1.0, w), DomainError);
  }
}

TEST_CASE("K positivity") {
  for (double lambda : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    for (double kappa : {0.0, 1.0}) {
      const auto k = k_positive_check(CutoffWindow(lambda, kappa), 1001);
      CHECK(k.all_nonnegative);
      CHECK(k.min_value > 0.0);
    }
  }
  CHECK(k_poly(0.0, CutoffWindow(2.0, 0.0)) == doctest::Approx(8.0 + 4.0 - 4.0));
  const std::array<double, 4> grid = {1e2, 1e3, 1e4, 1e5};
  const auto t = k_positive_threshold(1.0, grid, 101);
  REQUIRE(t.has_value());
  CHECK(*t == 1e2);
}

TEST_CASE("arctan bracket stays away from zero") {
  const std::array<double, 5> grid = {1e2, 1e3, 1e4, 1e5, 1e6};
  const double inf = estimate_delta_infimum(0.0, grid, 201);
  CHECK(inf > 0.0);
  CHECK(inf < kPi);
}
