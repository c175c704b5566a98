#pragma once

// Scalar building blocks for the order-alpha and order-alpha^2 mass
// coefficients. Units: bare mass m = 1, hbar = c = 1.

#include <array>
#include <stdexcept>

namespace pfmass {

inline constexpr double kPi = 3.14159265358979323846;

/// Dimensionless UV/IR cutoff pair (Lambda/m, kappa/m).
class CutoffWindow {
public:
  CutoffWindow() = default;
  CutoffWindow(double lambda, double kappa);

  double lambda() const { return lambda_; }
  double kappa() const { return kappa_; }
  bool empty() const { return lambda_ == kappa_; }

private:
  double lambda_ = 0.0;
  double kappa_ = 0.0;
};

/// Radial momenta r1, r2 and the cosine X of their relative angle.
struct PolarPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  double X = 0.0;
};

using Vec3 = std::array<double, 3>;

struct CartesianPair {
  Vec3 k1{};
  Vec3 k2{};
};

/// Thrown when a kernel is evaluated outside its domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// (8/(3 pi)) log((lambda+2)/(kappa+2)).
double a1_closed(const CutoffWindow& w);

struct PolarDenominators {
  double L1;      // 1/(r1^2/2 + r1)
  double L2;      // 1/(r2^2/2 + r2)
  double F12inv;  // 1/((r1^2 + 2 r1 r2 X + r2^2)/2 + r1 + r2)
};

/// Throws DomainError at r1 = r2 = 0. L_j is +inf when r_j = 0.
PolarDenominators polar_denominators(const PolarPoint& p);

/// Resolvent 1/(r^2/2 + r) of a single free photon-electron pair.
inline double free_resolvent(double r) { return 1.0 / (0.5 * r * r + r); }

struct RhoDelta {
  double rho;
  double delta;
};

/// rho = r^2 + 2 lambda r X + lambda^2 + 2 r + 2 lambda and
/// delta = lambda^2 (1 - X^2) + 2 lambda (1 - X) - 1, so that
/// rho = (r + lambda X + 1)^2 + delta.
RhoDelta rho_and_delta(double r, double X, double lambda);

struct ProjectorContractions {
  double trQQ;        // tr[Q1 Q2]
  double bilinearQQ;  // (k2, Q1 Q2 k1)
  double quad1;       // (k1, Q2 k1)
  double quad2;       // (k2, Q1 k2)
};

/// Contractions of the transverse projectors Q(k) = 1 - k^ k^T, evaluated by
/// explicit 3x3 matrix products.
ProjectorContractions projector_contractions_matrix(const Vec3& k1, const Vec3& k2);

/// Same contractions through the identities in s = k1^ . k2^:
/// tr = 1 + s^2, bilinear = (k1.k2)(s^2 - 1), quad1 = |k1|^2 (1 - s^2).
ProjectorContractions projector_contractions_closed(const Vec3& k1, const Vec3& k2);

struct CartesianDenominators {
  double E1inv;
  double E2inv;
  double E12inv;
};

CartesianDenominators cartesian_denominators(const CartesianPair& c);

double norm(const Vec3& v);
double dot(const Vec3& a, const Vec3& b);

}  // namespace pfmass
