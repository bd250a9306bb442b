#pragma once

// CSV and JSON renderings of grids, certificates, sweeps and audits.
// Floats are written with 17 significant digits so reports round-trip.

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman.hpp"
#include "marginal.hpp"
#include "mep.hpp"
#include "smoothing.hpp"

namespace prekopa {

using json = nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

// ---- marginal ----

inline std::string marginal_csv_header() { return "t,phi,second_diff,violation_flag\n"; }

inline std::string marginal_csv_rows(const MarginalGrid& grid, const ConvexityReport& rep, const std::string& prefix = {}) {
  std::string out;
  for (int i = 0; i < grid.count; ++i) {
    out += prefix + fmt_double(grid.t(i)) + ',' + fmt_double(grid.phi_values[static_cast<std::size_t>(i)]) + ',';
    if (i > 0 && i + 1 < grid.count) {
      const double d2 = rep.second_differences[static_cast<std::size_t>(i - 1)];
      out += fmt_double(d2) + ',' + (d2 < -rep.tolerance ? "1" : "0");
    } else {
      out += ",0";
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const ConvexityReport& rep) {
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"t", x.t}, {"second_diff", x.value}});
  return {{"h", rep.h},
          {"tolerance", rep.tolerance},
          {"min_second_difference", rep.min_second_difference},
          {"verdict", std::string(to_string(rep.verdict))},
          {"violation_count", rep.violations.size()},
          {"violations", v}};
}

inline json to_json(const MarginalGrid& grid) {
  json j{{"weight", grid.weight_id},
         {"t0", grid.t0},
         {"h", grid.h},
         {"count", grid.count},
         {"phi", grid.phi_values},
         {"quadrature",
          {{"order", grid.quad.order},
           {"exhaustion_tol", grid.quad.exhaustion_tol},
           {"min_balls", grid.quad.min_balls},
           {"max_balls", grid.quad.max_balls}}}};
  if (grid.exhaustion_traces) {
    std::size_t longest = 0;
    for (const auto& tr : *grid.exhaustion_traces) longest = std::max(longest, tr.size());
    j["exhaustion_max_length"] = longest;
  }
  return j;
}

// ---- certificates ----

inline std::string certificate_csv_header() { return "a_re,a_im,r,minimal_norm,bound,verdict\n"; }

inline std::string certificate_csv_row(const ExtensionCertificate& c) {
  return fmt_double(c.center.real()) + ',' + fmt_double(c.center.imag()) + ',' + fmt_double(c.radius) + ',' +
         fmt_double(c.minimal_norm) + ',' + fmt_double(c.bound) + ',' + std::string(to_string(c.verdict)) + '\n';
}

inline json to_json(const ExtensionCertificate& c) {
  json mags = json::array();
  for (const auto& k : c.coefficients) mags.push_back(std::abs(k));
  return {{"weight", c.weight_id},
          {"a", complex_json(c.center)},
          {"r", c.radius},
          {"degree", c.degree},
          {"phi_at_a", c.phi_at_center},
          {"minimal_norm", c.minimal_norm},
          {"bound", c.bound},
          {"verdict", std::string(to_string(c.verdict))},
          {"convergence",
           {{"half_degree", c.convergence.half_degree},
            {"norm_at_half", c.convergence.norm_at_half},
            {"norm_at_full", c.convergence.norm_at_full}}},
          {"stabilized", c.stabilized},
          {"coefficient_magnitudes", mags}};
}

inline std::string sweep_csv(const MepSweep& s) {
  std::string out = certificate_csv_header();
  for (const auto& cell : s.cells) {
    if (cell.certificate) {
      out += certificate_csv_row(*cell.certificate);
    } else {
      out += fmt_double(cell.center.real()) + ',' + fmt_double(cell.center.imag()) + ',' + fmt_double(cell.radius) +
             ",,,error\n";
    }
  }
  return out;
}

inline json to_json(const MepSweep& s) {
  json cells = json::array();
  for (const auto& cell : s.cells) {
    if (cell.certificate) {
      cells.push_back(to_json(*cell.certificate));
    } else {
      cells.push_back({{"a", complex_json(cell.center)}, {"r", cell.radius}, {"error", cell.error}});
    }
  }
  json viol = json::array();
  for (const auto& v : s.violations) viol.push_back({{"a", complex_json(v.center)}, {"r", v.radius}, {"reason", v.reason}});
  return {{"weight", s.weight_id},
          {"overall", s.all_pass() ? "all-pass" : "violations"},
          {"violation_count", s.violations.size()},
          {"violations", viol},
          {"cells", cells}};
}

// ---- mean value ----

inline std::string mean_value_csv(const MeanValueReport& r) {
  return "a_re,a_im,r,area_mean,value_at_center,jensen_lhs,log_modulus_mean,bound_slack,jensen_slack,submean_slack,"
         "mean_value_slack\n" +
         fmt_double(r.center.real()) + ',' + fmt_double(r.center.imag()) + ',' + fmt_double(r.radius) + ',' +
         fmt_double(r.area_mean) + ',' + fmt_double(r.value_at_center) + ',' + fmt_double(r.jensen_lhs) + ',' +
         fmt_double(r.log_modulus_mean) + ',' + fmt_double(r.bound_slack) + ',' + fmt_double(r.jensen_slack) + ',' +
         fmt_double(r.submean_slack) + ',' + fmt_double(r.mean_value_slack) + '\n';
}

inline json to_json(const MeanValueReport& r) {
  return {{"a", complex_json(r.center)},
          {"r", r.radius},
          {"area_mean", r.area_mean},
          {"value_at_center", r.value_at_center},
          {"jensen_lhs", r.jensen_lhs},
          {"log_modulus_mean", r.log_modulus_mean},
          {"slack",
           {{"bound", r.bound_slack},
            {"jensen", r.jensen_slack},
            {"submean", r.submean_slack},
            {"mean_value", r.mean_value_slack}}}};
}

// ---- smoothing ----

inline std::string audit_csv_header() { return "R,n,a_R,lower,upper,ratio,cap,grad_sup,bound\n"; }

inline std::string audit_csv_row(const ConstantsAudit& a) {
  const std::string mass = a.bump ? fmt_double(a.bump->mass) : "";
  const std::string grad = a.bump ? fmt_double(a.bump->grad_sup) : "";
  return fmt_double(a.R) + ',' + std::to_string(a.n) + ',' + mass + ',' + fmt_double(a.mass_lower) + ',' +
         fmt_double(a.mass_upper) + ',' + fmt_double(a.ratio) + ',' + fmt_double(a.cap) + ',' + grad + ',' +
         fmt_double(a.grad_bound) + '\n';
}

inline json to_json(const ConstantsAudit& a) {
  json j{{"R", a.R},
         {"n", a.n},
         {"ratio", a.ratio},
         {"cap", a.cap},
         {"grad_factor", a.grad_factor},
         {"mass_lower", a.mass_lower},
         {"mass_upper", a.mass_upper},
         {"grad_bound", a.grad_bound},
         {"c_psi", kProfileSlopeBound}};
  if (a.bump) {
    j["a_R"] = a.bump->mass;
    j["grad_sup"] = a.bump->grad_sup;
  }
  return j;
}

}  // namespace prekopa
