#include "pfmass/quadrature.hpp"

#include <boost/random/sobol.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "pfmass/parallel.hpp"

namespace pfmass {

namespace {

// Tolerances for the inner axes are tightened so their accumulated error
// leaves room for the outer rule.
QuadratureSpec inner_spec(const QuadratureSpec& spec, double factor) {
  QuadratureSpec s = spec;
  s.rel_tol = spec.rel_tol * factor;
  s.abs_tol = spec.abs_tol * factor;
  return s;
}

}  // namespace

IntegralResult integrate_b_term(TermId j, const CutoffWindow& w, const QuadratureSpec& spec) {
  if (!is_b_term(j)) throw std::invalid_argument("integrate_b_term: not a b-term: " + std::string(to_string(j)));
  spec.validate();
  if (w.empty()) return {};
  const double lambda = w.lambda();
  const double kappa = w.kappa();
  const QuadratureSpec mid_spec = inner_spec(spec, 0.25);
  const QuadratureSpec in_spec = inner_spec(spec, 0.0625);
  const auto x_bps = angular_breakpoints(-1.0, 1.0, lambda, spec.split_at_paper_boundary);
  const auto r1_bps = radial_breakpoints(kappa, lambda);

  bool converged = true;
  auto outer = [&](double X) {
    auto middle = [&](double r1) {
      const auto r2_bps = radial_breakpoints(kappa, lambda, {r1});
      auto inner = [&](double r2) { return polar_integrand(j, PolarPoint{r1, r2, X}); };
      IntegralResult r = integrate_adaptive(inner, r2_bps, in_spec);
      converged = converged && r.converged;
      return r;
    };
    IntegralResult r = integrate_adaptive(middle, r1_bps, mid_spec);
    converged = converged && r.converged;
    return r;
  };
  IntegralResult out = integrate_adaptive(outer, x_bps, spec);
  out.converged = out.converged && converged;
  return out;
}

A2Result a2_polar(const CutoffWindow& w, const QuadratureSpec& spec) {
  spec.validate();
  A2Result out;
  parallel_for(kBTerms.size(), spec.workers,
               [&](std::size_t i) { out.b[i] = integrate_b_term(kBTerms[i], w, spec); });
  double sum = 0.0;
  double err2 = 0.0;
  bool converged = true;
  std::size_t evals = 0;
  for (const auto& b : out.b) {
    sum += b.value;
    err2 += b.error_estimate * b.error_estimate;
    converged = converged && b.converged;
    evals += b.evaluations;
  }
  const double pre = a2_polar_prefactor();
  out.a2 = {pre * sum, pre * std::sqrt(err2), evals, converged};
  return out;
}

// ---------------------------------------------------------------------------
// Scrambled Sobol points

struct ScrambledSobol::Impl {
  explicit Impl(unsigned dim) : engine(dim) {}
  boost::random::sobol_engine<std::uint32_t, 32> engine;
};

ScrambledSobol::ScrambledSobol(unsigned dimension, std::uint64_t seed)
    : dimension_(dimension), matrices_(dimension), shifts_(dimension), impl_(std::make_unique<Impl>(dimension)) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  for (unsigned d = 0; d < dimension; ++d) {
    for (unsigned b = 0; b < 32; ++b) {
      const std::uint32_t below = b == 0 ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << b) - 1);
      matrices_[d][b] = (std::uint32_t{1} << b) | (static_cast<std::uint32_t>(rng()) & below);
    }
    shifts_[d] = static_cast<std::uint32_t>(rng());
  }
}

ScrambledSobol::~ScrambledSobol() = default;
ScrambledSobol::ScrambledSobol(ScrambledSobol&&) noexcept = default;
ScrambledSobol& ScrambledSobol::operator=(ScrambledSobol&&) noexcept = default;

void ScrambledSobol::next(std::span<double> out) {
  if (out.size() != dimension_) throw std::invalid_argument("ScrambledSobol::next: wrong output size");
  for (unsigned d = 0; d < dimension_; ++d) {
    const std::uint32_t x = impl_->engine();
    std::uint32_t y = 0;
    for (unsigned b = 0; b < 32; ++b) {
      if (x & (std::uint32_t{1} << b)) y ^= matrices_[d][b];
    }
    y ^= shifts_[d];
    out[d] = (static_cast<double>(y) + 0.5) * 0x1p-32;
  }
}

namespace {

// Radial coordinate drawn with density 1/((r + 2) log((lambda+2)/(kappa+2)))
// by inverse CDF; `weight` receives 4 pi r^2 / density.
Vec3 shell_point(double u_r, double u_c, double u_phi, double kappa, double log_ratio, double& weight) {
  const double r = (kappa + 2.0) * std::exp(u_r * log_ratio) - 2.0;
  const double c = 2.0 * u_c - 1.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double phi = 2.0 * kPi * u_phi;
  weight = 4.0 * kPi * r * r * (r + 2.0) * log_ratio;
  return {r * s * std::cos(phi), r * s * std::sin(phi), r * c};
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t replicate) {
  // splitmix64 step
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (replicate + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

QmcResult a2_cartesian_qmc(const CutoffWindow& w, const QuadratureSpec& spec) {
  spec.validate();
  QmcResult out;
  const auto reps = static_cast<std::size_t>(spec.qmc_replicates);
  out.replicate_means.assign(reps, 0.0);
  if (w.empty()) {
    out.estimate = {0.0, 0.0, 0, true};
    return out;
  }
  const double log_ratio = std::log((w.lambda() + 2.0) / (w.kappa() + 2.0));
  const double pre = (4.0 * kPi) * (4.0 * kPi) * (2.0 / 3.0);

  parallel_for(reps, spec.workers, [&](std::size_t rep) {
    ScrambledSobol sobol(6, replicate_seed(spec.qmc_seed, rep));
    std::array<double, 6> u{};
    double sum = 0.0;
    for (std::size_t n = 0; n < spec.qmc_samples; ++n) {
      sobol.next(u);
      double w1 = 0.0;
      double w2 = 0.0;
      const CartesianPair c{shell_point(u[0], u[1], u[2], w.kappa(), log_ratio, w1),
                            shell_point(u[3], u[4], u[5], w.kappa(), log_ratio, w2)};
      const auto terms = e_terms(c, projector_contractions_matrix(c.k1, c.k2));
      sum += w1 * w2 * (terms[0] + terms[1] + terms[2] + terms[3] + terms[4]);
    }
    out.replicate_means[rep] = pre * sum / static_cast<double>(spec.qmc_samples);
  });

  const double mean = std::accumulate(out.replicate_means.begin(), out.replicate_means.end(), 0.0) /
                      static_cast<double>(reps);
  double var = 0.0;
  for (double m : out.replicate_means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(reps - 1);
  const double stderr_mean = std::sqrt(var / static_cast<double>(reps));
  out.estimate.value = mean;
  out.estimate.error_estimate = stderr_mean;
  out.estimate.evaluations = reps * spec.qmc_samples;
  out.estimate.converged = stderr_mean <= std::max(spec.abs_tol, spec.rel_tol * std::abs(mean));
  return out;
}

AppendixAIntegrals appendixA_scaled_integrals(double lambda, const QuadratureSpec& spec) {
  if (!(lambda >= 4.0)) throw std::invalid_argument("appendixA_scaled_integrals needs lambda >= 4");
  spec.validate();
  const auto x_bps = angular_breakpoints(-1.0, 1.0, lambda, spec.split_at_paper_boundary);
  const QuadratureSpec in_spec = inner_spec(spec, 0.125);
  AppendixAIntegrals out;
  for (int k = 0; k < 4; ++k) {
    bool converged = true;
    auto outer = [&](double X) {
      const double r_min = -lambda * X - 1.0;
      const auto r_bps = radial_breakpoints(0.0, lambda, {r_min});
      auto inner = [&](double r) {
        const double rho = rho_and_delta(r, X, lambda).rho;
        switch (k) {
          case 0:
            return 1.0 / rho;
          case 1:
            return 1.0 / (rho * rho);
          case 2:
            return 1.0 / (rho * (r + 2.0));
          default:
            return (1.0 - X * X) / (rho * rho);
        }
      };
      IntegralResult r = integrate_adaptive(inner, r_bps, in_spec);
      converged = converged && r.converged;
      return r;
    };
    IntegralResult r = integrate_adaptive(outer, x_bps, spec);
    r.converged = r.converged && converged;
    out.raw[static_cast<std::size_t>(k)] = r;
    out.converged = out.converged && r.converged;
  }
  const std::array<double, 4> factors = {lambda, std::pow(lambda, 2.5), lambda * lambda / std::log(lambda),
                                         lambda * lambda * lambda};
  for (std::size_t k = 0; k < 4; ++k) out.scaled[k] = factors[k] * out.raw[k].value;
  return out;
}

}  // namespace pfmass
