#pragma once

// Bump functions chi_R on R^n, their masses and gradient bounds, normalized
// convolution against sampled fields, and audits of the constants used when
// passing from extensions on V + i B_R to the limit R -> infinity.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace prekopa {

/// sup |psi'| for the profile below. The supremum sits at u = 1/2, where
/// S'(1/2) = 8 / 4. Re-measured by the smoothing tests.
inline constexpr double kProfileSlopeBound = 2.0;

inline constexpr double kMinBumpRadius = 9.0;

namespace detail {
inline double flat_exp(double v) { return v > 0 ? std::exp(-1.0 / v) : 0.0; }
}  // namespace detail

/// C-infinity step: 0 for v <= 0, 1 for v >= 1.
inline double smooth_step(double v) {
  const double a = detail::flat_exp(v);
  const double b = detail::flat_exp(1 - v);
  return a / (a + b);
}

inline double smooth_step_derivative(double v) {
  if (v <= 0 || v >= 1) return 0.0;
  const double a = detail::flat_exp(v);
  const double b = detail::flat_exp(1 - v);
  const double da = a / (v * v);
  const double db = b / ((1 - v) * (1 - v));
  return (da * b + a * db) / ((a + b) * (a + b));
}

/// psi(u) = S(1 - u): 1 on (-inf, 0], 0 on [1, inf).
inline double bump_profile(double u) { return smooth_step(1 - u); }
inline double bump_profile_derivative(double u) { return -smooth_step_derivative(1 - u); }

inline double unit_ball_volume(int n) {
  if (n < 1) throw ArgumentError("dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1);
}

/// chi_R(y) = psi((|y| - (R - 2 sqrt R)) / sqrt R).
struct BumpProfile {
  double R = 0;
  int n = 1;
  double inner = 0;  // R - 2 sqrt R
  double outer = 0;  // R - sqrt R
  double mass = 0;   // a_R
  double grad_sup = 0;
  double c_psi = kProfileSlopeBound;

  double at_radius(double rho) const { return bump_profile((rho - inner) / std::sqrt(R)); }

  double operator()(std::span<const double> y) const {
    double r2 = 0;
    for (double v : y) r2 += v * v;
    return at_radius(std::sqrt(r2));
  }
};

inline BumpProfile make_bump(double R, int n) {
  if (!(R >= kMinBumpRadius) || !std::isfinite(R)) throw DomainError("bump radius R must be at least 9");
  if (n < 1) throw DomainError("bump dimension must be positive");
  BumpProfile b;
  b.R = R;
  b.n = n;
  const double s = std::sqrt(R);
  b.inner = R - 2 * s;
  b.outer = R - s;

  // a_R = sigma_n inner^n + n sigma_n int_inner^outer psi(.) rho^{n-1} drho
  const double sigma = unit_ball_volume(n);
  constexpr int panels = 16;
  const auto& gl = gauss_legendre(32);
  std::vector<double> terms;
  terms.reserve(panels * gl.nodes.size());
  const double width = (b.outer - b.inner) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = b.inner + (p + 0.5) * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double rho = mid + 0.5 * width * gl.nodes[i];
      terms.push_back(0.5 * width * gl.weights[i] * b.at_radius(rho) * std::pow(rho, n - 1));
    }
  }
  b.mass = sigma * std::pow(b.inner, n) + n * sigma * pairwise_sum(terms);

  // Difference quotients never exceed the true sup of |d chi / d rho|.
  constexpr int samples = 10000;
  const double step = (b.outer - b.inner) / samples;
  double prev = b.at_radius(b.inner);
  for (int k = 1; k <= samples; ++k) {
    const double cur = b.at_radius(b.inner + k * step);
    b.grad_sup = std::max(b.grad_sup, std::abs(cur - prev) / step);
    prev = cur;
  }
  return b;
}

struct ConstantsAudit {
  double R = 0;
  int n = 1;
  double ratio = 0;        // (R / (R - 2 sqrt R))^{2n}
  double cap = 0;          // (5/4)^{2n}
  double grad_factor = 0;  // (C_psi / sqrt R)^2
  std::optional<BumpProfile> bump;  // present once R >= 9
  double mass_lower = 0;   // sigma_n (R - 2 sqrt R)^n
  double mass_upper = 0;   // sigma_n (R - sqrt R)^n
  double grad_bound = 0;   // C_psi / sqrt R
};

inline double constants_ratio(double R, int n) { return std::pow(R / (R - 2 * std::sqrt(R)), 2 * n); }

inline ConstantsAudit constants_audit(double R, int n) {
  if (!(R > 4) || !std::isfinite(R)) throw DomainError("constants audit needs R > 4");
  if (n < 1) throw DomainError("dimension must be positive");
  ConstantsAudit a;
  a.R = R;
  a.n = n;
  a.ratio = constants_ratio(R, n);
  a.cap = std::pow(1.25, 2 * n);
  a.grad_bound = kProfileSlopeBound / std::sqrt(R);
  a.grad_factor = a.grad_bound * a.grad_bound;
  if (R >= 100 && !(a.ratio <= a.cap)) throw AuditError("ratio exceeds (5/4)^{2n} for R >= 100");
  if (!(constants_ratio(2 * R, n) < a.ratio && constants_ratio(4 * R, n) < constants_ratio(2 * R, n)))
    throw AuditError("ratio is not decreasing along R, 2R, 4R");
  const double sigma = unit_ball_volume(n);
  a.mass_lower = sigma * std::pow(R - 2 * std::sqrt(R), n);
  a.mass_upper = sigma * std::pow(R - std::sqrt(R), n);
  if (R >= kMinBumpRadius) {
    a.bump = make_bump(R, n);
    if (!(a.mass_lower <= a.bump->mass && a.bump->mass <= a.mass_upper))
      throw AuditError("bump mass outside [sigma_n (R - 2 sqrt R)^n, sigma_n (R - sqrt R)^n]");
    if (!(a.bump->grad_sup <= a.grad_bound)) throw AuditError("bump gradient exceeds C_psi / sqrt R");
  }
  return a;
}

/// Values on the cell-centred grid origin + (k + 1/2) step, k in [0, count)^n,
/// last axis fastest. Zero outside the grid.
struct SampledField {
  int n = 1;
  double origin = 0;
  double step = 0;
  int count = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double coordinate(int k) const { return origin + (k + 0.5) * step; }
  void node(std::size_t index, std::span<double> out) const {
    for (int d = n - 1; d >= 0; --d) {
      out[static_cast<std::size_t>(d)] = coordinate(static_cast<int>(index % static_cast<std::size_t>(count)));
      index /= static_cast<std::size_t>(count);
    }
  }
};

/// Samples f on the cube [-half_width, half_width]^n with a step close to
/// `step` that divides the cube evenly.
template <class Fn>
SampledField sample_field(int n, double half_width, double step, Fn&& f) {
  if (n < 1 || !(half_width > 0) || !(step > 0)) throw ArgumentError("bad sampling grid");
  SampledField s;
  s.n = n;
  s.count = static_cast<int>(std::ceil(2 * half_width / step - 1e-9));
  s.step = 2 * half_width / s.count;
  s.origin = -half_width;
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(s.count);
  s.values.resize(total);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < total; ++i) {
    s.node(i, x);
    s.values[i] = f(std::span<const double>(x));
  }
  return s;
}

inline constexpr int kMaxFieldDimension = 8;

inline double default_convolution_step(double R) { return std::sqrt(R) / 64; }

/// (1/a_R) int f(w) chi_R(y - w) dw by the trapezoid (cell-centred) rule.
inline double convolve(const SampledField& f, const BumpProfile& bump, std::span<const double> y) {
  if (f.n != bump.n || static_cast<int>(y.size()) != bump.n) throw ArgumentError("dimension mismatch in convolve");
  if (f.n > kMaxFieldDimension) throw ArgumentError("sampled fields support at most 8 dimensions");
  if (f.origin > -bump.R || f.origin + f.count * f.step < bump.R)
    throw CoverageError("sample grid does not cover the ball |w| < R");
  std::vector<double> terms(f.size());
  parallel_for(f.size(), [&](std::size_t i) {
    if (f.values[i] == 0) return;
    double buf[kMaxFieldDimension];
    const std::span<double> node(buf, static_cast<std::size_t>(f.n));
    f.node(i, node);
    double r2 = 0;
    for (int d = 0; d < f.n; ++d) r2 += (y[static_cast<std::size_t>(d)] - node[static_cast<std::size_t>(d)]) *
                                       (y[static_cast<std::size_t>(d)] - node[static_cast<std::size_t>(d)]);
    const double r = std::sqrt(r2);
    if (r >= bump.outer) return;
    terms[i] = f.values[i] * bump.at_radius(r);
  });
  return pairwise_sum(terms) * std::pow(f.step, f.n) / bump.mass;
}

struct YoungBound {
  double lhs = 0;  // |f~(y)|^2
  double rhs = 0;  // sigma_n R^n / a_R^2 * int |f|^2
};

inline YoungBound young_bound_check(const SampledField& f, const BumpProfile& bump, std::span<const double> y) {
  const double c = convolve(f, bump, y);
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f.values[i] * f.values[i];
  const double l2 = pairwise_sum(sq) * std::pow(f.step, f.n);
  YoungBound out{c * c, unit_ball_volume(bump.n) * std::pow(bump.R, bump.n) / (bump.mass * bump.mass) * l2};
  if (!(out.lhs <= out.rhs * (1 + 1e-10))) throw AuditError("pointwise convolution bound violated");
  return out;
}

}  // namespace prekopa
