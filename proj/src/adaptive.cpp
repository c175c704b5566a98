#include "pfmass/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace pfmass {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0, got " + std::to_string(rel_tol));
  if (!(abs_tol >= 0.0)) throw std::invalid_argument("abs_tol must be >= 0, got " + std::to_string(abs_tol));
  if (max_subdivisions < 1) {
    throw std::invalid_argument("max_subdivisions must be >= 1, got " + std::to_string(max_subdivisions));
  }
  if (qmc_samples < 2) throw std::invalid_argument("qmc_samples must be >= 2, got " + std::to_string(qmc_samples));
  if (qmc_replicates < 2) {
    throw std::invalid_argument("qmc_replicates must be >= 2, got " + std::to_string(qmc_replicates));
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

namespace {

std::string describe_sample(double x, double fx) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand returned " << fx << " at x = " << x;
  return os.str();
}

}  // namespace

NonFiniteSample::NonFiniteSample(double x, double fx) : std::runtime_error(describe_sample(x, fx)), x_(x) {}

IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec) {
  if (!(a < b)) {
    if (a == b) return {};
    throw std::invalid_argument("integrate_1d requires a < b");
  }
  const std::array<double, 2> bps{a, b};
  return integrate_adaptive(f, bps, spec);
}

namespace {

std::vector<double> assemble(double lo, double hi, std::vector<double> pts) {
  std::vector<double> out{lo};
  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    if (p > lo && p < hi && p > out.back()) out.push_back(p);
  }
  out.push_back(hi);
  return out;
}

}  // namespace

std::vector<double> radial_breakpoints(double lo, double hi, std::initializer_list<double> extra) {
  if (!(lo < hi)) return {lo, hi};
  std::vector<double> pts(extra);
  pts.push_back(1.0);
  pts.push_back(2.0);
  for (double p = 10.0; p < hi; p *= 10.0) pts.push_back(p);
  return assemble(lo, hi, std::move(pts));
}

std::vector<double> angular_breakpoints(double lo, double hi, double lambda, bool paper_boundary) {
  if (!(lo < hi)) return {lo, hi};
  std::vector<double> pts{0.0};
  const double finest = lambda > 0.0 ? 0.1 / lambda : 0.1;
  for (double d = 0.1; d >= finest; d *= 0.1) pts.push_back(-1.0 + d);
  if (paper_boundary && lambda > 1.0) pts.push_back(-1.0 + 1.0 / lambda);
  return assemble(lo, hi, std::move(pts));
}

}  // namespace pfmass
