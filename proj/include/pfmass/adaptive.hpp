#pragma once

// Deterministic globally adaptive Gauss-Kronrod 7/15 quadrature. Nested
// integrals are built by letting the integrand return an inner result.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>


namespace pfmass {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  /// Maximum number of panels per axis.
  int max_subdivisions = 400;
  /// Insert a breakpoint at X = -1 + 1/lambda.
  bool split_at_paper_boundary = true;
  std::size_t qmc_samples = std::size_t{1} << 16;
  std::uint64_t qmc_seed = 20040117;
  int qmc_replicates = 16;
  /// Worker threads used by the multi-term drivers. Results do not depend on it.
  unsigned workers = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Thrown when an integrand returns a non-finite value.
class NonFiniteSample : public std::runtime_error {
public:
  NonFiniteSample(double x, double fx);
  double abscissa() const { return x_; }

private:
  double x_;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Value of an integrand at one abscissa together with the error already
// committed in producing it (nonzero when the value is itself an integral).
struct Sample {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 1;
};

inline Sample as_sample(double v) { return {v, 0.0, 1}; }
inline Sample as_sample(const Sample& s) { return s; }
inline Sample as_sample(const IntegralResult& r) { return {r.value, r.error_estimate, r.evaluations}; }

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b, std::size_t& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  auto eval = [&](int slot, double x) {
    const Sample s = as_sample(f(x));
    if (!std::isfinite(s.value)) throw NonFiniteSample(x, s.value);
    fv[slot] = s.value;
    evaluations += s.evaluations;
    return s.error;
  };
  std::array<double, 15> inner{};
  inner[14] = eval(14, center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    inner[2 * j] = eval(2 * j, center - dx);
    inner[2 * j + 1] = eval(2 * j + 1, center + dx);
  }
  double kronrod = kWgk[7] * fv[14];
  double gauss = kWg[3] * fv[14];
  double resabs = std::abs(kronrod);
  double inner_err = kWgk[7] * inner[14];
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[2 * j] + fv[2 * j + 1];
    kronrod += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    inner_err += kWgk[j] * (inner[2 * j] + inner[2 * j + 1]);
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[7] * std::abs(fv[14] - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  }
  const double habs = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  resasc *= habs;
  resabs *= habs;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
  return {a, b, kronrod * half, err + inner_err * habs};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over the partition given by
/// `breakpoints` (sorted, at least two entries). The integrand may return a
/// double, a detail::Sample or an IntegralResult; inner error estimates are
/// carried into the total. The panel with the largest error is bisected
/// first, ties going to the leftmost panel, so the result depends only on
/// the inputs. Rules are open: the endpoints are never sampled.
template <class F>
IntegralResult integrate_adaptive(F&& f, std::span<const double> breakpoints, const QuadratureSpec& spec) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive needs at least two breakpoints");
  std::vector<detail::Panel> panels;
  panels.reserve(static_cast<std::size_t>(spec.max_subdivisions) + breakpoints.size());
  IntegralResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(a < b)) {
      if (a == b) continue;
      throw std::invalid_argument("breakpoints must be nondecreasing");
    }
    panels.push_back(detail::gauss_kronrod_15(f, a, b, out.evaluations));
  }
  if (panels.empty()) return out;

  auto totals = [&](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
    }
  };
  const int limit = std::max<int>(spec.max_subdivisions, static_cast<int>(panels.size()));
  double value = 0.0;
  double error = 0.0;
  totals(value, error);
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
    if (static_cast<int>(panels.size()) >= limit) {
      out.converged = false;
      break;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const detail::Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(p.a < mid && mid < p.b)) {
      out.converged = false;
      break;
    }
    panels[worst] = detail::gauss_kronrod_15(f, p.a, mid, out.evaluations);
    panels.insert(panels.begin() + static_cast<std::ptrdiff_t>(worst) + 1,
                  detail::gauss_kronrod_15(f, mid, p.b, out.evaluations));
    totals(value, error);
  }
  out.value = value;
  out.error_estimate = error;
  return out;
}

/// Adaptive integral of f over (a, b).
IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec);

/// Geometric partition of [lo, hi] with extra interior points `extra`
/// (duplicates and out-of-range points are dropped). Points are placed at
/// 1, 2 and successive powers of ten inside the interval.
std::vector<double> radial_breakpoints(double lo, double hi, std::initializer_list<double> extra = {});

/// Partition of [lo, hi] (a subrange of [-1, 1]) refined geometrically
/// toward X = -1 on the 1/lambda scale, plus -1 + 1/lambda when requested.
std::vector<double> angular_breakpoints(double lo, double hi, double lambda, bool paper_boundary);

}  // namespace pfmass
