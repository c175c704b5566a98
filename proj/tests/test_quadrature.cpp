#include <doctest.h>

#include <cmath>
#include <cstring>

#include "pfmass/asymptotics.hpp"
#include "pfmass/quadrature.hpp"

using namespace pfmass;

namespace {

double b4_closed(const CutoffWindow& w) {
  const double l = std::log((w.lambda() + 2.0) / (w.kappa() + 2.0));
  return -32.0 * kPi / 3.0 * l * l;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same(const IntegralResult& a, const IntegralResult& b) {
  return same_bits(a.value, b.value) && same_bits(a.error_estimate, b.error_estimate) &&
         a.evaluations == b.evaluations && a.converged == b.converged;
}

}  // namespace

TEST_CASE("spec validation") {
  QuadratureSpec s;
  CHECK_NOTHROW(s.validate());
  s.rel_tol = 0.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("rel_tol"), std::invalid_argument);
  s = {};
  s.max_subdivisions = 0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("max_subdivisions"), std::invalid_argument);
  s = {};
  s.workers = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("integrate_1d oracles with honest errors") {
  QuadratureSpec spec;
  struct Case {
    std::function<double(double)> f;
    double a, b, exact;
  };
  const Case cases[] = {
      {[](double x) { return x * x; }, 0.0, 1.0, 1.0 / 3.0},
      {[](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 2.0},
      {[](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
      {[](double x) { return 1.0 / (0.5 * x + 1.0); }, 0.0, 1e6, 2.0 * std::log((1e6 + 2.0) / 2.0)},
      {[](double x) { return std::exp(-x) * std::cos(x); }, 0.0, 40.0, 0.5 * (1.0 - std::exp(-40.0) * (std::cos(40.0) - std::sin(40.0)))},
  };
  for (const auto& c : cases) {
    const auto r = integrate_1d(c.f, c.a, c.b, spec);
    CHECK(r.converged);
    CHECK(std::abs(r.value - c.exact) <= r.error_estimate);
    CHECK(r.error_estimate <= spec.rel_tol * std::abs(c.exact) * 1.0001);
  }
}

TEST_CASE("integrate_1d edge cases") {
  QuadratureSpec spec;
  const auto zero = integrate_1d([](double) { return 1.0; }, 2.0, 2.0, spec);
  CHECK(zero.value == 0.0);
  CHECK(zero.evaluations == 0);
  CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 2.0, 1.0, spec), std::invalid_argument);
  CHECK_THROWS_AS(integrate_1d([](double x) { return x < 0.5 ? 1.0 : NAN; }, 0.0, 1.0, spec), NonFiniteSample);
  spec.max_subdivisions = 2;
  const auto capped = integrate_1d([](double x) { return std::sin(200.0 * x); }, 0.0, 10.0, spec);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("error estimates shrink under refinement") {
  double previous = INFINITY;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    QuadratureSpec spec;
    spec.rel_tol = tol;
    const auto r = integrate_1d([](double x) { return std::pow(x, -0.3) * std::cos(x); }, 0.0, 30.0, spec);
    CHECK(r.error_estimate <= previous);
    previous = r.error_estimate;
  }
}

TEST_CASE("breakpoint helpers") {
  const auto r = radial_breakpoints(0.0, 1e3, {5.0, 2.0, 2e3});
  CHECK(r.front() == 0.0);
  CHECK(r.back() == 1e3);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  CHECK(std::find(r.begin(), r.end(), 5.0) != r.end());
  CHECK(std::find(r.begin(), r.end(), 2e3) == r.end());
  const auto x = angular_breakpoints(-1.0, 1.0, 1e3, true);
  CHECK(x.front() == -1.0);
  CHECK(x.back() == 1.0);
  CHECK(std::find(x.begin(), x.end(), -1.0 + 1e-3) != x.end());
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
}

TEST_CASE("b4 factorizes into a squared logarithm") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  for (double lambda : {10.0, 1e3}) {
    for (double kappa : {0.0, 1.0}) {
      const CutoffWindow w(lambda, kappa);
      const auto r = integrate_b_term(TermId::B4, w, spec);
      CHECK(r.converged);
      CHECK(std::abs(r.value / b4_closed(w) - 1.0) <= 1e-8);
      CHECK(std::abs(r.value - b4_closed(w)) <= r.error_estimate);
    }
  }
}

TEST_CASE("b-term drivers") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-6;
  const CutoffWindow empty(3.0, 3.0);
  CHECK(integrate_b_term(TermId::B2, empty, spec).value == 0.0);
  CHECK_THROWS_AS(integrate_b_term(TermId::E1, CutoffWindow(3.0, 0.0), spec), std::invalid_argument);
  const auto a = a2_polar(CutoffWindow(5.0, 1.0), spec);
  double sum = 0.0;
  for (const auto& b : a.b) sum += b.value;
  CHECK(a.a2.value == doctest::Approx(a2_polar_prefactor() * sum).epsilon(1e-14));
  CHECK(a2_polar_prefactor() == doctest::Approx(16.0 * kPi * kPi / std::pow(2.0 * kPi, 6) * 2.0 / 3.0));
}

TEST_CASE("worker count does not change results") {
  QuadratureSpec one;
  one.rel_tol = 1e-6;
  QuadratureSpec many = one;
  many.workers = 4;
  const CutoffWindow w(20.0, 1.0);
  const auto a = a2_polar(w, one);
  const auto b = a2_polar(w, many);
  CHECK(same(a.a2, b.a2));
  for (int j = 0; j < 6; ++j) CHECK(same(a.b[j], b.b[j]));
  one.qmc_samples = many.qmc_samples = 1 << 12;
  const auto q1 = a2_cartesian_qmc(w, one);
  const auto q2 = a2_cartesian_qmc(w, many);
  CHECK(same(q1.estimate, q2.estimate));
  CHECK(q1.replicate_means == q2.replicate_means);
}

TEST_CASE("QMC estimate against the polar integral") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-3;
  const CutoffWindow w(10.0, 1.0);
  const auto q = a2_cartesian_qmc(w, spec);
  spec.rel_tol = 1e-7;
  const auto p = a2_polar(w, spec);
  CHECK(q.replicate_means.size() == 16);
  CHECK(q.estimate.converged);
  CHECK(std::abs(q.estimate.value / p.a2.value - 2.0 * kPi) <= 5.0 * q.estimate.error_estimate / std::abs(p.a2.value));
}

TEST_CASE("scrambled Sobol points") {
  ScrambledSobol a(6, 42);
  ScrambledSobol b(6, 42);
  ScrambledSobol c(6, 43);
  std::array<double, 6> pa{}, pb{}, pc{};
  double mean = 0.0;
  bool differs = false;
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    a.next(pa);
    b.next(pb);
    c.next(pc);
    CHECK(pa == pb);
    differs = differs || pa != pc;
    for (double x : pa) {
      CHECK(x > 0.0);
      CHECK(x < 1.0);
    }
    mean += pa[3];
  }
  CHECK(differs);
  CHECK(mean / n == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("rho-integral bounds stay bounded") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-7;
  const auto lo = appendixA_scaled_integrals(1e2, spec);
  const auto hi = appendixA_scaled_integrals(1e4, spec);
  CHECK(lo.converged);
  CHECK(hi.converged);
  for (int i = 0; i < 4; ++i) {
    CHECK(lo.scaled[i] > 0.0);
    CHECK(hi.scaled[i] / lo.scaled[i] < 1.5);
  }
  CHECK(lo.scaled[0] == doctest::Approx(lo.raw[0].value * 1e2));
  CHECK_THROWS_AS(appendixA_scaled_integrals(2.0, spec), std::invalid_argument);
}
