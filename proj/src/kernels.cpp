#include "pfmass/kernels.hpp"

#include <cmath>
#include <string>

namespace pfmass {

CutoffWindow::CutoffWindow(double lambda, double kappa) : lambda_(lambda), kappa_(kappa) {
  if (!std::isfinite(lambda) || !std::isfinite(kappa) || kappa < 0.0 || kappa > lambda) {
    throw std::invalid_argument("cutoff window requires 0 <= kappa <= lambda, got lambda=" +
                                std::to_string(lambda) + " kappa=" + std::to_string(kappa));
  }
}

double a1_closed(const CutoffWindow& w) {
  return 8.0 / (3.0 * kPi) * std::log((w.lambda() + 2.0) / (w.kappa() + 2.0));
}

PolarDenominators polar_denominators(const PolarPoint& p) {
  if (p.r1 == 0.0 && p.r2 == 0.0) {
    throw DomainError("polar denominators are singular at r1 = r2 = 0");
  }
  const double q = 0.5 * (p.r1 * p.r1 + 2.0 * p.r1 * p.r2 * p.X + p.r2 * p.r2);
  return {free_resolvent(p.r1), free_resolvent(p.r2), 1.0 / (q + p.r1 + p.r2)};
}

RhoDelta rho_and_delta(double r, double X, double lambda) {
  const double rho = r * r + 2.0 * lambda * r * X + lambda * lambda + 2.0 * r + 2.0 * lambda;
  const double delta = lambda * lambda * (1.0 - X * X) + 2.0 * lambda * (1.0 - X) - 1.0;
  return {rho, delta};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 transverse_projector(const Vec3& k) {
  const double n = norm(k);
  Mat3 q{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      q[i][j] = (i == j ? 1.0 : 0.0) - (k[i] / n) * (k[j] / n);
    }
  }
  return q;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) s += a[i][l] * b[l][j];
      c[i][j] = s;
    }
  }
  return c;
}

Vec3 apply(const Mat3& a, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
  return out;
}

void require_nonzero(const Vec3& k1, const Vec3& k2) {
  if (norm(k1) == 0.0 || norm(k2) == 0.0) {
    throw DomainError("projector contractions need nonzero momenta");
  }
}

}  // namespace

ProjectorContractions projector_contractions_matrix(const Vec3& k1, const Vec3& k2) {
  require_nonzero(k1, k2);
  const Mat3 q1 = transverse_projector(k1);
  const Mat3 q2 = transverse_projector(k2);
  const Mat3 q12 = multiply(q1, q2);
  const double tr = q12[0][0] + q12[1][1] + q12[2][2];
  return {tr, dot(k2, apply(q12, k1)), dot(k1, apply(q2, k1)), dot(k2, apply(q1, k2))};
}

ProjectorContractions projector_contractions_closed(const Vec3& k1, const Vec3& k2) {
  require_nonzero(k1, k2);
  const double n1 = norm(k1);
  const double n2 = norm(k2);
  const double k12 = dot(k1, k2);
  const double s = k12 / (n1 * n2);
  const double s2 = s * s;
  return {1.0 + s2, k12 * (s2 - 1.0), n1 * n1 * (1.0 - s2), n2 * n2 * (1.0 - s2)};
}

CartesianDenominators cartesian_denominators(const CartesianPair& c) {
  const double n1 = norm(c.k1);
  const double n2 = norm(c.k2);
  if (n1 == 0.0 || n2 == 0.0) throw DomainError("cartesian denominators need nonzero momenta");
  const Vec3 sum{c.k1[0] + c.k2[0], c.k1[1] + c.k2[1], c.k1[2] + c.k2[2]};
  const double s2 = dot(sum, sum);
  return {free_resolvent(n1), free_resolvent(n2), 1.0 / (0.5 * s2 + n1 + n2)};
}

}  // namespace pfmass
