#pragma once

// Minimal-norm holomorphic extension on a disk.
//
// Over polynomials f = sum_k c_k ((tau - a) / r)^k of degree <= N, minimize
// int_{Delta(a;r)} |f|^2 exp(-Phi) subject to f(a) = c_0 = 1. The minimum is
// 1 / K(a, a) with K(a, a) = e_0^* G^{-1} e_0 the diagonal of the truncated
// weighted Bergman kernel. The truncated minimum over-estimates the true one,
// so a pass is always sound and a fail only once the degree has settled.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace prekopa {

using cplx = std::complex<double>;

inline constexpr int kDefaultDegree = 16;
inline constexpr double kPassSlack = 1e-9;
inline constexpr double kStabilizationTolerance = 1e-8;

/// G(j, k) = int ((tau - a)/r)^j conj(((tau - a)/r)^k) exp(-Phi) dlambda.
struct MonomialGram {
  cplx center;
  double radius = 0;
  int degree = 0;
  Eigen::MatrixXcd gram;
  std::string weight_id;
};

inline MonomialGram gram_matrix(const PlanarWeight& weight, cplx a, double r, int degree, const DiskRule& rule) {
  if (degree < 0) throw ArgumentError("degree must be nonnegative");
  if (std::abs(rule.center() - a) > 1e-14 * (1 + std::abs(a)) || std::abs(rule.radius() - r) > 1e-14 * r)
    throw ArgumentError("disk rule does not cover the requested disk");
  const std::size_t nodes = rule.size();
  std::vector<double> phi(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const double v = weight(rule.nodes()[i]);
    if (std::isnan(v)) {
      const auto z = rule.nodes()[i];
      throw IntegrationError("weight '" + weight.id + "' is NaN at a disk node", {z.real(), z.imag()});
    }
    if (!std::isfinite(v)) throw ArgumentError("weight '" + weight.id + "' is not finite on the closed disk");
    phi[i] = v;
  });
  double shift = phi.empty() ? 0.0 : phi.front();
  for (double v : phi) shift = std::min(shift, v);

  const auto dim = static_cast<std::size_t>(degree + 1);
  std::vector<double> scaled_weight(nodes);
  std::vector<cplx> powers(nodes * dim);
  for (std::size_t i = 0; i < nodes; ++i) {
    scaled_weight[i] = rule.weights()[i] * std::exp(-(phi[i] - shift));
    const cplx u = (rule.nodes()[i] - a) / r;
    cplx p = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      powers[i * dim + k] = p;
      p *= u;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> upper;
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = j; k < dim; ++k) upper.emplace_back(j, k);

  MonomialGram g{a, r, degree, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                 weight.id};
  const double restore = std::exp(-shift);
  parallel_for(upper.size(), [&](std::size_t e) {
    const auto [j, k] = upper[e];
    std::vector<cplx> terms(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
      terms[i] = scaled_weight[i] * powers[i * dim + j] * std::conj(powers[i * dim + k]);
    cplx v = pairwise_sum(terms) * restore;
    if (j == k) v = cplx(v.real(), 0.0);
    g.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
    g.gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(v);
  });
  return g;
}

inline MonomialGram gram_matrix(const PlanarWeight& weight, cplx a, double r, int degree = kDefaultDegree) {
  return gram_matrix(weight, a, r, degree, DiskRule(a, r));
}

namespace detail {

/// Lower-triangular L with L L^* = m. Throws on a non-positive pivot.
inline Eigen::MatrixXcd hermitian_cholesky(const Eigen::MatrixXcd& m, int degree, std::string_view what) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0) || !std::isfinite(d))
      throw ConditioningError(std::string(what) + ": non-positive pivot " + std::to_string(j) + " at degree " +
                                  std::to_string(degree),
                              degree);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

/// Solves L L^* x = b.
inline Eigen::VectorXcd cholesky_solve(const Eigen::MatrixXcd& l, Eigen::VectorXcd b) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * b(k);
    b(i) = s / l(i, i);
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    cplx s = b(i);
    for (Eigen::Index k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * b(k);
    b(i) = s / l(i, i).real();
  }
  return b;
}

struct ConstrainedMinimum {
  double norm;
  std::vector<cplx> coefficients;
};

// Norm form: ||sum c_k e_k||^2 = c^* M c with M = conj(G). Eliminates c_0 = 1:
// c_rest = -M_rr^{-1} m_r0, minimum = m_00 - m_0r M_rr^{-1} m_r0.
inline ConstrainedMinimum constrained_minimum(const Eigen::MatrixXcd& gram, int degree) {
  const Eigen::MatrixXcd m = gram.conjugate();
  hermitian_cholesky(m, degree, "Gram matrix is not positive definite");
  const Eigen::Index n = m.rows();
  ConstrainedMinimum out{m(0, 0).real(), {cplx(1.0, 0.0)}};
  if (n == 1) return out;
  const Eigen::MatrixXcd mrr = m.bottomRightCorner(n - 1, n - 1);
  const Eigen::VectorXcd mr0 = m.col(0).tail(n - 1);
  const auto l = hermitian_cholesky(mrr, degree, "reduced system is singular");
  const Eigen::VectorXcd y = cholesky_solve(l, mr0);
  out.norm = m(0, 0).real() - (mr0.adjoint() * y)(0).real();
  for (Eigen::Index k = 0; k < n - 1; ++k) out.coefficients.push_back(-y(k));
  return out;
}

}  // namespace detail

enum class ExtensionVerdict { pass, fail_at_truncation };

inline std::string_view to_string(ExtensionVerdict v) {
  return v == ExtensionVerdict::pass ? "pass" : "fail-at-truncation";
}

struct DegreeConvergence {
  int half_degree = 0;
  double norm_at_half = 0;
  double norm_at_full = 0;
};

struct ExtensionCertificate {
  cplx center;
  double radius = 0;
  int degree = 0;
  std::string weight_id;
  double phi_at_center = 0;
  double minimal_norm = 0;
  double bound = 0;  // pi r^2 exp(-Phi(a))
  std::vector<cplx> coefficients;  // in the basis ((tau - a)/r)^k; coefficients[0] == 1
  ExtensionVerdict verdict = ExtensionVerdict::pass;
  DegreeConvergence convergence;
  bool stabilized = false;  // relative change between N/2 and N below 1e-8

  /// A fail verdict whose degree sequence has settled.
  bool certified_violation() const { return verdict == ExtensionVerdict::fail_at_truncation && stabilized; }

  cplx evaluate(cplx tau) const {
    const cplx u = (tau - center) / radius;
    cplx acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
};

inline ExtensionCertificate min_extension(const MonomialGram& g, double phi_at_a) {
  if (!std::isfinite(phi_at_a)) throw ArgumentError("Phi(a) must be finite");
  const auto full = detail::constrained_minimum(g.gram, g.degree);
  const int half = g.degree / 2;
  const auto lead = static_cast<Eigen::Index>(half + 1);
  const double half_norm =
      half == g.degree ? full.norm : detail::constrained_minimum(g.gram.topLeftCorner(lead, lead), half).norm;

  ExtensionCertificate c;
  c.center = g.center;
  c.radius = g.radius;
  c.degree = g.degree;
  c.weight_id = g.weight_id;
  c.phi_at_center = phi_at_a;
  c.minimal_norm = full.norm;
  c.bound = std::numbers::pi * g.radius * g.radius * std::exp(-phi_at_a);
  c.coefficients = full.coefficients;
  c.verdict = c.minimal_norm <= c.bound * (1 + kPassSlack) ? ExtensionVerdict::pass : ExtensionVerdict::fail_at_truncation;
  c.convergence = {half, half_norm, full.norm};
  c.stabilized = std::abs(full.norm - half_norm) < kStabilizationTolerance * std::abs(full.norm);
  return c;
}

/// e_0^* G^{-1} e_0, the truncated Bergman kernel on the diagonal at a.
inline double kernel_diag(const MonomialGram& g) {
  const Eigen::MatrixXcd m = g.gram.conjugate();
  const auto l = detail::hermitian_cholesky(m, g.degree, "Gram matrix is not positive definite");
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(m.rows());
  e0(0) = 1;
  return detail::cholesky_solve(l, e0)(0).real();
}

/// int |f|^2 exp(-Phi) recomputed from the certificate's coefficients.
inline double reintegrate_norm(const PlanarWeight& weight, const ExtensionCertificate& cert, const DiskRule& rule) {
  return integrate_disk([&](cplx tau) { return std::norm(cert.evaluate(tau)) * std::exp(-weight(tau)); }, rule);
}

}  // namespace prekopa
