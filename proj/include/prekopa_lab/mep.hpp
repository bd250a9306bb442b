#pragma once

// Minimal extension property checks: single disks, (a, r) sweeps, the
// Jensen / mean-value chain, and the reduced tube-domain certificate.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "errors.hpp"
#include "marginal.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace prekopa {

inline constexpr double kJensenTolerance = 1e-8;
inline constexpr double kLogFloor = -700.0;

struct DiskOrders {
  int radial = kDefaultDiskRadialOrder;
  int angular = kDefaultDiskAngularCount;
};

inline ExtensionCertificate mep_check(const PlanarWeight& weight, cplx a, double r, int degree = kDefaultDegree,
                                      DiskOrders orders = {}) {
  if (!(r > 0) || !std::isfinite(r)) throw ArgumentError("disk radius must be positive");
  if (!weight.contains_disk(a, r)) throw ArgumentError("disk leaves the domain of weight '" + weight.id + "'");
  const double phi_a = weight(a);
  if (!std::isfinite(phi_a)) throw ArgumentError("Phi(a) must be finite for weight '" + weight.id + "'");
  const DiskRule rule(a, r, orders.radial, orders.angular);
  return min_extension(gram_matrix(weight, a, r, degree, rule), phi_a);
}

struct SweepCell {
  cplx center;
  double radius = 0;
  std::optional<ExtensionCertificate> certificate;
  std::string error;
};

struct SweepViolation {
  cplx center;
  double radius = 0;
  std::string reason;
};

struct MepSweep {
  std::string weight_id;
  std::vector<cplx> centers;
  std::vector<double> radii;
  std::vector<SweepCell> cells;  // row-major: center index, then radius index
  std::vector<SweepViolation> violations;

  bool all_pass() const { return violations.empty(); }
  const SweepCell& cell(std::size_t center, std::size_t radius) const { return cells[center * radii.size() + radius]; }
};

/// 5 x 5 lattice on [-1, 1]^2, real part varying fastest.
inline std::vector<cplx> default_sweep_centers() {
  std::vector<cplx> out;
  for (int im = 0; im < 5; ++im)
    for (int re = 0; re < 5; ++re) out.emplace_back(-1.0 + 0.5 * re, -1.0 + 0.5 * im);
  return out;
}

inline std::vector<double> default_sweep_radii() { return {0.25, 0.5, 1.0}; }

inline MepSweep mep_sweep(const PlanarWeight& weight, const std::vector<cplx>& centers,
                          const std::vector<double>& radii, int degree = kDefaultDegree, DiskOrders orders = {}) {
  for (const auto& a : centers)
    for (double r : radii)
      if (!(r > 0) || !weight.contains_disk(a, r))
        throw ArgumentError("sweep disk leaves the domain of weight '" + weight.id + "'");
  MepSweep sweep{weight.id, centers, radii, std::vector<SweepCell>(centers.size() * radii.size()), {}};
  parallel_for(sweep.cells.size(), [&](std::size_t i) {
    auto& cell = sweep.cells[i];
    cell.center = centers[i / radii.size()];
    cell.radius = radii[i % radii.size()];
    try {
      cell.certificate = mep_check(weight, cell.center, cell.radius, degree, orders);
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });
  for (const auto& cell : sweep.cells) {
    if (!cell.certificate) {
      sweep.violations.push_back({cell.center, cell.radius, cell.error});
    } else if (cell.certificate->verdict != ExtensionVerdict::pass) {
      sweep.violations.push_back({cell.center, cell.radius,
                                  cell.certificate->stabilized ? "minimal norm exceeds bound (degree settled)"
                                                               : "minimal norm exceeds bound (degree not settled)"});
    }
  }
  return sweep;
}

/// The chain, for f(a) = 1 and averages over Delta(a; r):
///   -Phi(a) >= log avg(|f|^2 e^{-Phi}) >= avg(log|f|^2) - avg(Phi) >= -avg(Phi).
struct MeanValueReport {
  cplx center;
  double radius = 0;
  double area_mean = 0;        // avg Phi
  double value_at_center = 0;  // Phi(a)
  double jensen_lhs = 0;       // -log avg(|f|^2 e^{-Phi})
  double log_modulus_mean = 0; // avg log|f|^2
  double bound_slack = 0;      // -Phi(a) - log avg(|f|^2 e^{-Phi})
  double jensen_slack = 0;     // log avg(|f|^2 e^{-Phi}) - (avg log|f|^2 - avg Phi)
  double submean_slack = 0;    // avg log|f|^2 - log|f(a)|^2
  double mean_value_slack = 0; // avg Phi - Phi(a)
};

inline MeanValueReport mean_value_check(const PlanarWeight& weight, const ExtensionCertificate& cert,
                                        const DiskRule& rule) {
  if (cert.verdict != ExtensionVerdict::pass) throw ArgumentError("mean-value chain needs a pass certificate");
  if (std::abs(rule.center() - cert.center) > 1e-14 * (1 + std::abs(cert.center)) ||
      std::abs(rule.radius() - cert.radius) > 1e-14 * cert.radius)
    throw ArgumentError("disk rule does not match the certificate's disk");
  const std::size_t nodes = rule.size();
  const double area = std::numbers::pi * cert.radius * cert.radius;
  std::vector<double> phi(nodes), log_mod(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const auto tau = rule.nodes()[i];
    phi[i] = weight(tau);
    const double m = std::norm(cert.evaluate(tau));
    log_mod[i] = m > 0 ? std::max(std::log(m), kLogFloor) : kLogFloor;
  });
  double shift = phi.front();
  for (std::size_t i = 0; i < nodes; ++i) shift = std::min(shift, phi[i] - log_mod[i]);
  std::vector<double> mean_terms(nodes), log_terms(nodes), norm_terms(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double w = rule.weights()[i] / area;
    mean_terms[i] = w * phi[i];
    log_terms[i] = w * log_mod[i];
    norm_terms[i] = w * std::exp(-(phi[i] - log_mod[i] - shift));
  }
  MeanValueReport rep;
  rep.center = cert.center;
  rep.radius = cert.radius;
  rep.area_mean = pairwise_sum(mean_terms);
  rep.value_at_center = cert.phi_at_center;
  rep.log_modulus_mean = pairwise_sum(log_terms);
  const double log_avg = std::log(pairwise_sum(norm_terms)) - shift;
  rep.jensen_lhs = -log_avg;
  rep.bound_slack = -rep.value_at_center - log_avg;
  rep.jensen_slack = log_avg - (rep.log_modulus_mean - rep.area_mean);
  rep.submean_slack = rep.log_modulus_mean - std::log(std::norm(cert.evaluate(cert.center)));
  rep.mean_value_slack = rep.area_mean - rep.value_at_center;
  for (double s : {rep.bound_slack, rep.jensen_slack, rep.submean_slack, rep.mean_value_slack}) {
    if (s < -kJensenTolerance)
      throw ConsistencyError("Jensen / mean-value chain broken for weight '" + weight.id + "'");
  }
  return rep;
}

inline MeanValueReport mean_value_check(const PlanarWeight& weight, const ExtensionCertificate& cert) {
  return mean_value_check(weight, cert, DiskRule(cert.center, cert.radius));
}

/// Checks int_{Delta x V} |f(tau)|^2 e^{-phi} <= pi r^2 int_V e^{-phi(a, x)} for
/// extensions f depending on tau only, which reduces to the minimal extension
/// check for the planar weight Phi(Re tau).
inline ExtensionCertificate tube_certificate(const WeightSpec& spec, cplx a, double r, int degree = kDefaultDegree,
                                             const MarginalOptions& opts = {}, DiskOrders orders = {}) {
  return mep_check(marginal_lift(spec, opts), a, r, degree, orders);
}

}  // namespace prekopa
