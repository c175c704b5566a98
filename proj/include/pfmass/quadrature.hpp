#pragma once

// Drivers for the polar b_j integrals, the Cartesian Sobol cross-check of a2
// and the rho-integral bounds.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "pfmass/adaptive.hpp"
#include "pfmass/integrands.hpp"
#include "pfmass/kernels.hpp"

namespace pfmass {

/// b_j(lambda, kappa) = integral over X in [-1,1], r1, r2 in [kappa, lambda]
/// of the polar kernel of term j (X outermost, then r1, then r2).
IntegralResult integrate_b_term(TermId j, const CutoffWindow& w, const QuadratureSpec& spec);

struct A2Result {
  IntegralResult a2;
  std::array<IntegralResult, 6> b;
};

/// Prefactor (4 pi)^2 / (2 pi)^6 * 2/3 relating sum_j b_j to a2.
inline constexpr double a2_polar_prefactor() {
  return (4.0 * kPi) * (4.0 * kPi) / ((2.0 * kPi) * (2.0 * kPi) * (2.0 * kPi) * (2.0 * kPi) * (2.0 * kPi) * (2.0 * kPi)) *
         (2.0 / 3.0);
}

/// a2 from the six polar terms; error estimates combined in quadrature.
A2Result a2_polar(const CutoffWindow& w, const QuadratureSpec& spec);

struct QmcResult {
  IntegralResult estimate;
  std::vector<double> replicate_means;
};

/// a2 from the 6-D Cartesian integral sampled with scrambled Sobol points
/// uniform in the product of momentum shells. error_estimate is the standard
/// error over replicates; converged requires it below the spec tolerance.
QmcResult a2_cartesian_qmc(const CutoffWindow& w, const QuadratureSpec& spec);

struct AppendixAIntegrals {
  std::array<IntegralResult, 4> raw;  // I1..I4
  std::array<double, 4> scaled;       // S1..S4
  bool converged = true;
};

/// The four rho-integrals over X in [-1,1], r in [0, lambda] scaled by
/// lambda, lambda^{5/2}, lambda^2/log(lambda), lambda^3.
AppendixAIntegrals appendixA_scaled_integrals(double lambda, const QuadratureSpec& spec);

/// Sobol points in [0,1)^dim with a random linear (lower-triangular) scramble
/// and digital shift drawn from `seed`.
class ScrambledSobol {
public:
  ScrambledSobol(unsigned dimension, std::uint64_t seed);
  ~ScrambledSobol();
  ScrambledSobol(ScrambledSobol&&) noexcept;
  ScrambledSobol& operator=(ScrambledSobol&&) noexcept;
  /// Fills `out` (size = dimension) with the next point, strictly inside (0,1).
  void next(std::span<double> out);
  unsigned dimension() const { return dimension_; }

private:
  struct Impl;
  unsigned dimension_;
  std::vector<std::array<std::uint32_t, 32>> matrices_;  // column masks per dim
  std::vector<std::uint32_t> shifts_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pfmass
