#pragma once

// Deterministic Gauss-Legendre quadrature on boxes, balls, spherical shells
// and disks, plus exhaustion of R^n by balls B_j = {|x| < j}.
//
// Every integral is: evaluate at the nodes into a node-indexed buffer
// (possibly on several workers), multiply by the weights, reduce with
// pairwise_sum. The result does not depend on the worker count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "weights.hpp"

namespace prekopa {

inline constexpr int kDefaultBoxOrder = 48;
inline constexpr int kDefaultDiskRadialOrder = 48;
inline constexpr int kDefaultDiskAngularCount = 96;
inline constexpr int kDefaultMaxBalls = 64;

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
};

namespace detail {

inline QuadRule compute_gauss_legendre(int m) {
  QuadRule rule;
  rule.order = m;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // one more Legendre/derivative evaluation at the converged node
      double p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
    }
    const double w = 2.0 / ((1 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(m - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (m % 2 == 1) rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached per order; the returned reference stays valid for the program's life.
inline const QuadRule& gauss_legendre(int m) {
  if (m < 1) throw ArgumentError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const QuadRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<const QuadRule>(detail::compute_gauss_legendre(m));
  return *slot;
}

/// Flat list of points in R^dim with positive weights.
struct NodeSet {
  int dim = 1;
  std::vector<double> points;  // row-major, dim entries per node
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points).subspan(i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  }
  void append(const NodeSet& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }
};

namespace detail {

// Gauss panels on [lo, hi], one panel per piece between sorted split points.
inline void append_interval(std::vector<double>& x, std::vector<double>& w, double lo, double hi, int m,
                            std::span<const double> splits) {
  std::vector<double> cuts{lo};
  std::vector<double> inner;
  for (double s : splits) {
    if (s > lo && s < hi) inner.push_back(s);
  }
  std::sort(inner.begin(), inner.end());
  for (double s : inner) {
    if (s - cuts.back() > 1e-12 * (hi - lo)) cuts.push_back(s);
  }
  if (hi - cuts.back() <= 1e-12 * (hi - lo) && cuts.size() > 1) cuts.pop_back();
  cuts.push_back(hi);
  const auto& rule = gauss_legendre(m);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double half = 0.5 * (cuts[p + 1] - cuts[p]);
    const double mid = 0.5 * (cuts[p + 1] + cuts[p]);
    for (int i = 0; i < m; ++i) {
      x.push_back(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
      w.push_back(half * rule.weights[static_cast<std::size_t>(i)]);
    }
  }
}

inline std::string format_node(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace detail

/// Tensor Gauss-Legendre nodes on a box. For one-dimensional boxes, `splits`
/// are extra panel boundaries (kinks of the integrand).
inline NodeSet box_nodes(const DomainSpec& box, int m, std::span<const double> splits = {}) {
  if (box.shape() != DomainShape::box) throw ArgumentError("box_nodes needs a box domain");
  if (m < 2) throw ArgumentError("quadrature order must be at least 2");
  const int n = box.dimension();
  std::vector<std::vector<double>> ax(static_cast<std::size_t>(n)), aw(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const auto& b = box.bounds()[static_cast<std::size_t>(d)];
    detail::append_interval(ax[static_cast<std::size_t>(d)], aw[static_cast<std::size_t>(d)], b.lower, b.upper, m,
                            n == 1 ? splits : std::span<const double>{});
  }
  NodeSet set;
  set.dim = n;
  std::size_t total = 1;
  for (const auto& a : ax) total *= a.size();
  set.points.reserve(total * static_cast<std::size_t>(n));
  set.weights.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1;
    for (int d = 0; d < n; ++d) {
      const auto dd = static_cast<std::size_t>(d);
      set.points.push_back(ax[dd][idx[dd]]);
      w *= aw[dd][idx[dd]];
    }
    set.weights.push_back(w);
    for (int d = n - 1; d >= 0; --d) {
      const auto dd = static_cast<std::size_t>(d);
      if (++idx[dd] < ax[dd].size()) break;
      idx[dd] = 0;
    }
  }
  return set;
}

/// Nodes on the spherical shell inner <= |x| < outer in R^n, n in {1, 2, 3}.
/// Radial Gauss-Legendre of order m; angles use 2m trapezoid points (and, for
/// n = 3, Gauss-Legendre of order m in cos(polar angle)).
inline NodeSet shell_nodes(int n, double inner, double outer, int m, std::span<const double> splits = {}) {
  if (!(inner >= 0 && outer > inner)) throw ArgumentError("shell needs 0 <= inner < outer");
  if (m < 2) throw ArgumentError("quadrature order must be at least 2");
  NodeSet set;
  set.dim = n;
  if (n == 1) {
    detail::append_interval(set.points, set.weights, -outer, -inner, m, splits);
    detail::append_interval(set.points, set.weights, inner, outer, m, splits);
    return set;
  }
  std::vector<double> rho, rw;
  detail::append_interval(rho, rw, inner, outer, m, {});
  const int angular = 2 * m;
  const double dtheta = 2 * std::numbers::pi / angular;
  if (n == 2) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      for (int k = 0; k < angular; ++k) {
        const double th = dtheta * k;
        set.points.push_back(rho[i] * std::cos(th));
        set.points.push_back(rho[i] * std::sin(th));
        set.weights.push_back(rw[i] * rho[i] * dtheta);
      }
    }
    return set;
  }
  if (n == 3) {
    const auto& polar = gauss_legendre(m);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      for (int j = 0; j < m; ++j) {
        const double c = polar.nodes[static_cast<std::size_t>(j)];
        const double s = std::sqrt(1 - c * c);
        for (int k = 0; k < angular; ++k) {
          const double ph = dtheta * k;
          set.points.push_back(rho[i] * s * std::cos(ph));
          set.points.push_back(rho[i] * s * std::sin(ph));
          set.points.push_back(rho[i] * c);
          set.weights.push_back(rw[i] * rho[i] * rho[i] * polar.weights[static_cast<std::size_t>(j)] * dtheta);
        }
      }
    }
    return set;
  }
  throw ArgumentError("balls and shells are supported for dimensions 1 to 3");
}

inline NodeSet ball_nodes(int n, double radius, int m, std::span<const double> splits = {}) {
  return shell_nodes(n, 0.0, radius, m, splits);
}

/// Nodes for a bounded fiber domain (box or ball).
inline NodeSet domain_nodes(const DomainSpec& d, int m, std::span<const double> splits = {}) {
  switch (d.shape()) {
    case DomainShape::box: return box_nodes(d, m, splits);
    case DomainShape::ball: return ball_nodes(d.dimension(), d.radius(), m, splits);
    case DomainShape::full_space: break;
  }
  throw ArgumentError("domain_nodes needs a bounded domain");
}

using Integrand = std::function<double(std::span<const double>)>;

/// Sum of w_i f(x_i). NaN at a node is an IntegrationError carrying the node.
inline double integrate(const Integrand& f, const NodeSet& nodes) {
  std::vector<double> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double v = f(nodes.point(i));
    if (std::isnan(v)) {
      const auto p = nodes.point(i);
      throw IntegrationError("integrand is NaN at node " + detail::format_node(p),
                             std::vector<double>(p.begin(), p.end()));
    }
    terms[i] = nodes.weights[i] * v;
  });
  return pairwise_sum(terms);
}

inline double integrate_box(const Integrand& f, const DomainSpec& box, int m = kDefaultBoxOrder) {
  return integrate(f, box_nodes(box, m));
}

/// log of sum_i w_i exp(-phi(x_i)), computed as -s + log sum w_i exp(-(phi_i - s))
/// with s the smallest sampled phi. phi = +inf contributes 0; if every node
/// is +inf the result is -inf.
inline double log_integral_exp_neg(const Integrand& phi, const NodeSet& nodes) {
  std::vector<double> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double v = phi(nodes.point(i));
    if (std::isnan(v)) {
      const auto p = nodes.point(i);
      throw IntegrationError("weight is NaN at node " + detail::format_node(p), std::vector<double>(p.begin(), p.end()));
    }
    if (v == -kInfinity) throw DivergenceError("weight is -infinity at node " + detail::format_node(nodes.point(i)));
    values[i] = v;
  });
  double shift = kInfinity;
  for (double v : values) shift = std::min(shift, v);
  if (shift == kInfinity) return -kInfinity;
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = nodes.weights[i] * std::exp(-(values[i] - shift));
  return std::log(pairwise_sum(terms)) - shift;
}

/// Polar product rule on the disk |tau - center| < radius: Gauss-Legendre in
/// u = (rho / radius)^2 on [0, 1] and the uniform trapezoid rule in angle.
class DiskRule {
public:
  DiskRule(std::complex<double> center, double radius, int radial_order = kDefaultDiskRadialOrder,
           int angular_count = kDefaultDiskAngularCount)
    : center_(center), radius_(radius), radial_order_(radial_order), angular_count_(angular_count) {
    if (!(radius > 0) || !std::isfinite(radius)) throw ArgumentError("disk radius must be positive and finite");
    if (radial_order < 1 || angular_count < 1) throw ArgumentError("disk rule needs positive orders");
    const auto& gl = gauss_legendre(radial_order);
    const double dtheta = 2 * std::numbers::pi / angular_count;
    nodes_.reserve(static_cast<std::size_t>(radial_order * angular_count));
    weights_.reserve(nodes_.capacity());
    for (int i = 0; i < radial_order; ++i) {
      const double u = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1);
      const double wu = 0.5 * gl.weights[static_cast<std::size_t>(i)];
      const double rho = radius * std::sqrt(u);
      for (int k = 0; k < angular_count; ++k) {
        nodes_.push_back(center + std::polar(rho, dtheta * k));
        weights_.push_back(0.5 * radius * radius * wu * dtheta);
      }
    }
  }

  std::complex<double> center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int radial_order() const noexcept { return radial_order_; }
  int angular_count() const noexcept { return angular_count_; }
  const std::vector<std::complex<double>>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }

private:
  std::complex<double> center_;
  double radius_;
  int radial_order_;
  int angular_count_;
  std::vector<std::complex<double>> nodes_;
  std::vector<double> weights_;
};

using DiskIntegrand = std::function<double(std::complex<double>)>;

inline double integrate_disk(const DiskIntegrand& f, const DiskRule& rule) {
  std::vector<double> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) {
    const auto z = rule.nodes()[i];
    const double v = f(z);
    if (std::isnan(v)) throw IntegrationError("integrand is NaN at node " + detail::format_node(std::vector{z.real(), z.imag()}),
                                              {z.real(), z.imag()});
    terms[i] = rule.weights()[i] * v;
  });
  return pairwise_sum(terms);
}

struct ExhaustionOptions {
  int order = kDefaultBoxOrder;
  int min_balls = 1;
  int max_balls = kDefaultMaxBalls;
};

struct ExhaustionResult {
  double value = 0;
  std::vector<double> trace;  // integral over B_1, B_2, ...
};

/// Integrates f >= 0 over B_1, B_2, ... by adding the shell B_j \ B_{j-1} each
/// step, so the trace is nondecreasing by construction. Stops once a shell
/// adds less than tol (1 + |value|) and at least min_balls balls were used.
inline ExhaustionResult integrate_exhausted(const Integrand& f, int n, double tol, ExhaustionOptions opts = {}) {
  if (!(tol > 0)) throw ArgumentError("exhaustion tolerance must be positive");
  if (opts.max_balls < 1 || opts.min_balls > opts.max_balls) throw ArgumentError("bad exhaustion ball limits");
  ExhaustionResult res;
  double total = 0;
  for (int j = 1; j <= opts.max_balls; ++j) {
    const auto shell = shell_nodes(n, j - 1.0, j, opts.order);
    const double piece = integrate(
        [&](std::span<const double> x) {
          const double v = f(x);
          if (v < 0) throw ArgumentError("integrate_exhausted needs a nonnegative integrand");
          return v;
        },
        shell);
    const double next = total + piece;
    if (next < total) throw ConsistencyError("exhaustion trace decreased");
    res.trace.push_back(next);
    total = next;
    if (j >= opts.min_balls && j > 1 && piece < tol * (1 + std::abs(total))) {
      res.value = total;
      return res;
    }
  }
  throw TruncationError("exhaustion did not settle within " + std::to_string(opts.max_balls) + " balls", res.trace);
}

struct LogExhaustionResult {
  double log_value = 0;
  std::vector<double> log_trace;  // log of the integral over B_1, B_2, ...
};

namespace detail {
inline double log_add_exp(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  return a >= b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
}  // namespace detail

/// Log-domain exhaustion of int_{R^n} exp(-phi). `splits` is called per shell
/// for one-dimensional kinks (may be empty).
inline LogExhaustionResult log_integral_exp_neg_exhausted(const Integrand& phi, int n, double tol,
                                                          ExhaustionOptions opts = {},
                                                          std::span<const double> splits = {}) {
  if (!(tol > 0)) throw ArgumentError("exhaustion tolerance must be positive");
  if (opts.max_balls < 1 || opts.min_balls > opts.max_balls) throw ArgumentError("bad exhaustion ball limits");
  LogExhaustionResult res;
  double total = -kInfinity;
  const double log_tol = std::log(tol);
  for (int j = 1; j <= opts.max_balls; ++j) {
    const double piece = log_integral_exp_neg(phi, shell_nodes(n, j - 1.0, j, opts.order, splits));
    total = detail::log_add_exp(total, piece);
    res.log_trace.push_back(total);
    if (j >= opts.min_balls && j > 1 && total > -kInfinity && piece < log_tol + detail::softplus(total)) {
      res.log_value = total;
      return res;
    }
  }
  throw TruncationError("exhaustion did not settle within " + std::to_string(opts.max_balls) + " balls",
                        res.log_trace);
}

}  // namespace prekopa
