#pragma once

// Marginals Phi(t) = -log int_V exp(-phi(t, x)) dx, their exhaustion
// sequences Phi_j over balls B_j, and grid convexity certificates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace prekopa {

inline constexpr double kConvexityTolerance = 1e-8;

struct MarginalOptions {
  int order = kDefaultBoxOrder;
  double exhaustion_tol = 1e-14;
  int min_balls = 8;
  int max_balls = kDefaultMaxBalls;
};

struct MarginalValue {
  double phi = 0;
  std::vector<double> trace;  // Phi_1, Phi_2, ... for full-space fibers, else empty
};

namespace detail {
inline std::string at_t(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " at t = " << t;
  return os.str();
}
}  // namespace detail

inline MarginalValue marginal_with_trace(const WeightSpec& spec, double t, const MarginalOptions& opts = {}) {
  if (spec.is_planar()) throw ArgumentError("weight '" + spec.id() + "' is planar and has no fiber marginal");
  const auto& fiber = *spec.fiber();
  const auto splits = spec.fiber_breakpoints(t);
  const Integrand phi = [&](std::span<const double> x) { return spec.eval(t, x); };
  MarginalValue out;
  double log_mass = 0;
  if (fiber.bounded()) {
    log_mass = log_integral_exp_neg(phi, domain_nodes(fiber, opts.order, splits));
  } else {
    LogExhaustionResult ex;
    try {
      ex = log_integral_exp_neg_exhausted(phi, fiber.dimension(), opts.exhaustion_tol,
                                          {opts.order, opts.min_balls, opts.max_balls}, splits);
    } catch (const TruncationError& e) {
      if (!e.trace().empty() && e.trace().back() == -kInfinity)
        throw InfiniteMarginalError("fiber integral of '" + spec.id() + "' vanishes" + detail::at_t(t));
      throw DivergenceError("fiber integral of '" + spec.id() + "' diverges" + detail::at_t(t));
    }
    log_mass = ex.log_value;
    out.trace.reserve(ex.log_trace.size());
    for (double v : ex.log_trace) out.trace.push_back(-v);
  }
  if (log_mass == -kInfinity)
    throw InfiniteMarginalError("fiber integral of '" + spec.id() + "' vanishes" + detail::at_t(t));
  if (!std::isfinite(log_mass)) throw DivergenceError("fiber integral of '" + spec.id() + "' diverges" + detail::at_t(t));
  out.phi = -log_mass;
  return out;
}

inline double marginal_at(const WeightSpec& spec, double t, const MarginalOptions& opts = {}) {
  return marginal_with_trace(spec, t, opts).phi;
}

struct MarginalGrid {
  std::string weight_id;
  double t0 = 0;
  double h = 0;
  int count = 0;
  std::vector<double> phi_values;
  MarginalOptions quad;
  std::optional<std::vector<std::vector<double>>> exhaustion_traces;

  double t(int i) const { return t0 + i * h; }
};

inline void validate_grid_shape(double h, int count) {
  if (!(h > 0) || !std::isfinite(h)) throw ArgumentError("grid step must be positive");
  if (count < 3) throw ArgumentError("grid needs at least 3 points");
}

inline MarginalGrid marginal_grid(const WeightSpec& spec, double t0, double h, int count,
                                  const MarginalOptions& opts = {}) {
  validate_grid_shape(h, count);
  MarginalGrid grid{spec.id(), t0, h, count, std::vector<double>(static_cast<std::size_t>(count)), opts, std::nullopt};
  const bool exhausted = spec.fiber() && !spec.fiber()->bounded();
  std::vector<std::vector<double>> traces(exhausted ? static_cast<std::size_t>(count) : 0);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    auto v = marginal_with_trace(spec, grid.t(static_cast<int>(i)), opts);
    grid.phi_values[i] = v.phi;
    if (exhausted) traces[i] = std::move(v.trace);
  });
  if (exhausted) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& tr = traces[i];
      for (std::size_t j = 1; j < tr.size(); ++j) {
        if (tr[j] > tr[j - 1] + 1e-12)
          throw ConsistencyError("exhaustion trace increased" + detail::at_t(grid.t(static_cast<int>(i))));
      }
    }
    grid.exhaustion_traces = std::move(traces);
  }
  return grid;
}

enum class ConvexityVerdict { convex_on_grid, violated };

inline std::string_view to_string(ConvexityVerdict v) {
  return v == ConvexityVerdict::convex_on_grid ? "convex-on-grid" : "violated";
}

struct Violation {
  double t;
  double value;
};

struct ConvexityReport {
  double h = 0;
  double tolerance = 0;
  std::vector<double> second_differences;  // at interior points 1..N-2
  double min_second_difference = 0;
  std::vector<Violation> violations;
  ConvexityVerdict verdict = ConvexityVerdict::convex_on_grid;
};

/// Second central differences Phi(t_{i-1}) - 2 Phi(t_i) + Phi(t_{i+1}).
inline ConvexityReport convexity_check(double t0, double h, std::span<const double> values, double tol) {
  validate_grid_shape(h, static_cast<int>(values.size()));
  if (!(tol >= 0)) throw ArgumentError("convexity tolerance must be nonnegative");
  ConvexityReport rep;
  rep.h = h;
  rep.tolerance = tol;
  rep.min_second_difference = kInfinity;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double d2 = values[i - 1] - 2 * values[i] + values[i + 1];
    rep.second_differences.push_back(d2);
    rep.min_second_difference = std::min(rep.min_second_difference, d2);
    if (d2 < -tol) rep.violations.push_back({t0 + static_cast<double>(i) * h, d2});
  }
  rep.verdict = rep.min_second_difference >= -tol ? ConvexityVerdict::convex_on_grid : ConvexityVerdict::violated;
  return rep;
}

inline ConvexityReport convexity_check(const MarginalGrid& grid, double tol = kConvexityTolerance) {
  if (static_cast<int>(grid.phi_values.size()) != grid.count) throw ArgumentError("malformed marginal grid");
  return convexity_check(grid.t0, grid.h, grid.phi_values, tol);
}

/// Phi_j tabulated on the grid, j counted from 1. Requires every trace to
/// reach ball j.
inline std::vector<double> exhaustion_slice(const MarginalGrid& grid, int j) {
  if (!grid.exhaustion_traces) throw ArgumentError("grid has no exhaustion traces");
  std::vector<double> out;
  for (const auto& tr : *grid.exhaustion_traces) {
    if (j < 1 || static_cast<std::size_t>(j) > tr.size()) throw ArgumentError("exhaustion trace too short");
    out.push_back(tr[static_cast<std::size_t>(j - 1)]);
  }
  return out;
}

struct GridParams {
  double t0 = -3.0;
  double h = 0.05;
  int count = 121;
};

struct SuiteEntry {
  std::string id;
  ConvexFlag flag = ConvexFlag::unknown;
  std::optional<MarginalGrid> grid;
  std::optional<ConvexityReport> report;
  std::string error;
};

/// One report per spec; a failing spec records its error and the suite goes on.
inline std::vector<SuiteEntry> prekopa_suite(const std::vector<WeightSpec>& specs, GridParams params = {},
                                             double tol = kConvexityTolerance, const MarginalOptions& opts = {}) {
  std::vector<SuiteEntry> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    SuiteEntry e;
    e.id = spec.id();
    e.flag = spec.convex_flag();
    try {
      e.grid = marginal_grid(spec, params.t0, params.h, params.count, opts);
      e.report = convexity_check(*e.grid, tol);
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// The planar weight Phi-hat(tau) = Phi(Re tau) of a tube weight.
inline PlanarWeight marginal_lift(const WeightSpec& spec, const MarginalOptions& opts = {}) {
  if (spec.is_planar()) throw ArgumentError("weight '" + spec.id() + "' is already planar");
  return PlanarWeight{"lift:" + spec.id(),
                      [spec, opts](std::complex<double> tau) { return marginal_at(spec, tau.real(), opts); },
                      spec.convex_flag() == ConvexFlag::convex ? ConvexFlag::convex : ConvexFlag::unknown,
                      std::nullopt, std::nullopt};
}

}  // namespace prekopa
