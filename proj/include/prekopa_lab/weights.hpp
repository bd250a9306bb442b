#pragma once

// Weight functions phi(t, x) on R_t x V_x, their fiber domains V, and the
// catalog used by the certification suites.
//
// Tube weights depend on (t, x) only; their holomorphic lift to
// (tau, z) = (t + is, x + iy) reads the real parts and ignores the rest.
// Planar weights Phi(tau) on C (kind radial_planar) carry no fiber and are
// evaluated through planar_eval.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace prekopa {

enum class WeightKind { quadratic_form, max_affine, coupled_gaussian, norm_power, radial_planar, custom_callable };

/// Catalog ground truth. For radial_planar entries `convex` reads as
/// "plurisubharmonic" and `nonconvex` as "not plurisubharmonic".
enum class ConvexFlag { convex, nonconvex, unknown };

enum class DomainShape { box, ball, full_space };

struct Interval {
  double lower;
  double upper;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class DomainSpec {
public:
  static DomainSpec box(std::vector<Interval> bounds) {
    if (bounds.empty()) throw ArgumentError("box domain needs at least one axis");
    for (const auto& b : bounds) {
      if (!(b.lower < b.upper) || !std::isfinite(b.lower) || !std::isfinite(b.upper))
        throw ArgumentError("box axis requires finite lower < upper");
    }
    DomainSpec d;
    d.shape_ = DomainShape::box;
    d.dim_ = static_cast<int>(bounds.size());
    d.bounds_ = std::move(bounds);
    return d;
  }

  static DomainSpec ball(int n, double radius) {
    if (n < 1) throw ArgumentError("ball dimension must be positive");
    if (!(radius > 0) || !std::isfinite(radius)) throw ArgumentError("ball radius must be positive and finite");
    DomainSpec d;
    d.shape_ = DomainShape::ball;
    d.dim_ = n;
    d.radius_ = radius;
    return d;
  }

  static DomainSpec full_space(int n) {
    if (n < 1) throw ArgumentError("full-space dimension must be positive");
    DomainSpec d;
    d.shape_ = DomainShape::full_space;
    d.dim_ = n;
    return d;
  }

  DomainShape shape() const noexcept { return shape_; }
  int dimension() const noexcept { return dim_; }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }
  double radius() const noexcept { return radius_; }
  bool bounded() const noexcept { return shape_ != DomainShape::full_space; }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) return false;
    switch (shape_) {
      case DomainShape::box:
        for (int i = 0; i < dim_; ++i) {
          if (!(x[i] > bounds_[i].lower && x[i] < bounds_[i].upper)) return false;
        }
        return true;
      case DomainShape::ball: {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        return r2 < radius_ * radius_;
      }
      case DomainShape::full_space:
        return true;
    }
    return false;
  }

private:
  DomainSpec() = default;
  DomainShape shape_ = DomainShape::full_space;
  int dim_ = 1;
  std::vector<Interval> bounds_;
  double radius_ = 0;
};

using TubeFunction = std::function<double(double t, std::span<const double> x)>;

class WeightSpec {
public:
  /// Generic constructor used by the config loader. Validates the parameter
  /// layout of each kind:
  ///   quadratic-form   (n+1)^2 matrix entries over (t, x), row-major, then
  ///                    optionally n+1 linear coefficients and a constant
  ///   max-affine       K, then K rows (a_t, a_x1..a_xn, c)
  ///   coupled-gaussian c1, c2, c3 for c1 sum (t - x_i)^2 + c2 |x|^2 + c3 t^2 |x|^2
  ///   norm-power       p, s, q for |x - s t 1|^p + q t^2
  ///   radial-planar    c, p, center_re, center_im for c |tau - center|^p
  /// The quadratic-form and coupled-gaussian flags are computed; a supplied
  /// flag that disagrees is rejected.
  static WeightSpec make(std::string id, WeightKind kind, std::vector<double> params,
                         std::optional<DomainSpec> fiber, ConvexFlag flag) {
    if (kind == WeightKind::custom_callable)
      throw ArgumentError("custom-callable weights are built with WeightSpec::custom");
    if (kind == WeightKind::radial_planar) {
      if (fiber) throw ArgumentError("radial-planar weights live on C and take no fiber domain");
    } else if (!fiber) {
      throw ArgumentError("tube weights need a fiber domain; a weight depending on Im(tau) must be radial-planar");
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw ArgumentError("weight parameters must be finite");
    }
    WeightSpec w;
    w.id_ = std::move(id);
    w.kind_ = kind;
    w.params_ = std::move(params);
    w.fiber_ = std::move(fiber);
    w.flag_ = flag;
    const int n = w.fiber_ ? w.fiber_->dimension() : 0;
    const auto count = w.params_.size();
    switch (kind) {
      case WeightKind::quadratic_form: {
        const auto d = static_cast<std::size_t>(n + 1);
        if (count != d * d && count != d * d + d && count != d * d + d + 1)
          throw ArgumentError("quadratic-form expects (n+1)^2 [+ (n+1) [+ 1]] parameters");
        Eigen::MatrixXd q(d, d);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) q(i, j) = w.params_[i * d + j];
        if ((q - q.transpose()).cwiseAbs().maxCoeff() > 0) throw ArgumentError("quadratic-form matrix must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
        const auto computed = eig.eigenvalues().minCoeff() >= -1e-12 * scale ? ConvexFlag::convex : ConvexFlag::nonconvex;
        w.flag_ = check_flag(flag, computed);
        break;
      }
      case WeightKind::max_affine: {
        if (count < 1 || w.params_[0] < 1 || w.params_[0] != std::floor(w.params_[0]))
          throw ArgumentError("max-affine expects a positive piece count first");
        const auto pieces = static_cast<std::size_t>(w.params_[0]);
        if (count != 1 + pieces * static_cast<std::size_t>(n + 2))
          throw ArgumentError("max-affine expects K rows of n+2 coefficients");
        break;
      }
      case WeightKind::coupled_gaussian: {
        if (count != 3) throw ArgumentError("coupled-gaussian expects 3 parameters");
        const bool convex = w.params_[0] >= 0 && w.params_[1] >= 0 && w.params_[2] == 0;
        w.flag_ = check_flag(flag, convex ? ConvexFlag::convex : ConvexFlag::nonconvex);
        break;
      }
      case WeightKind::norm_power:
        if (count != 3) throw ArgumentError("norm-power expects 3 parameters");
        if (!(w.params_[0] > 0)) throw ArgumentError("norm-power exponent must be positive");
        break;
      case WeightKind::radial_planar:
        if (count != 4) throw ArgumentError("radial-planar expects 4 parameters");
        if (!(w.params_[1] > 0)) throw ArgumentError("radial-planar exponent must be positive");
        break;
      case WeightKind::custom_callable:
        break;
    }
    return w;
  }

  static WeightSpec quadratic_form(std::string id, std::vector<double> matrix, DomainSpec fiber,
                                   std::vector<double> linear = {}, std::optional<double> constant = {}) {
    auto params = std::move(matrix);
    if (constant && linear.empty()) linear.assign(static_cast<std::size_t>(fiber.dimension() + 1), 0.0);
    params.insert(params.end(), linear.begin(), linear.end());
    if (constant) params.push_back(*constant);
    return make(std::move(id), WeightKind::quadratic_form, std::move(params), std::move(fiber), ConvexFlag::unknown);
  }

  static WeightSpec coupled_gaussian(std::string id, double c1, double c2, double c3, DomainSpec fiber) {
    return make(std::move(id), WeightKind::coupled_gaussian, {c1, c2, c3}, std::move(fiber), ConvexFlag::unknown);
  }

  static WeightSpec max_affine(std::string id, const std::vector<std::vector<double>>& rows, DomainSpec fiber,
                               ConvexFlag flag) {
    std::vector<double> params{static_cast<double>(rows.size())};
    for (const auto& r : rows) params.insert(params.end(), r.begin(), r.end());
    return make(std::move(id), WeightKind::max_affine, std::move(params), std::move(fiber), flag);
  }

  static WeightSpec norm_power(std::string id, double p, double shift, double t_coeff, DomainSpec fiber,
                               ConvexFlag flag) {
    return make(std::move(id), WeightKind::norm_power, {p, shift, t_coeff}, std::move(fiber), flag);
  }

  static WeightSpec radial_planar(std::string id, double c, double p, std::complex<double> center, ConvexFlag flag) {
    return make(std::move(id), WeightKind::radial_planar, {c, p, center.real(), center.imag()}, std::nullopt, flag);
  }

  /// Custom weights never carry a convexity guarantee.
  static WeightSpec custom(std::string id, TubeFunction fn, DomainSpec fiber) {
    if (!fn) throw ArgumentError("custom weight needs a callable");
    WeightSpec w;
    w.id_ = std::move(id);
    w.kind_ = WeightKind::custom_callable;
    w.fiber_ = std::move(fiber);
    w.flag_ = ConvexFlag::unknown;
    w.custom_ = std::make_shared<const TubeFunction>(std::move(fn));
    return w;
  }

  const std::string& id() const noexcept { return id_; }
  WeightKind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::optional<DomainSpec>& fiber() const noexcept { return fiber_; }
  ConvexFlag convex_flag() const noexcept { return flag_; }
  bool is_planar() const noexcept { return kind_ == WeightKind::radial_planar; }
  int fiber_dimension() const noexcept { return fiber_ ? fiber_->dimension() : 0; }

  double eval(double t, std::span<const double> x) const {
    if (is_planar()) throw ArgumentError("weight '" + id_ + "' is planar; use planar_eval");
    const int n = fiber_->dimension();
    if (static_cast<int>(x.size()) != n) throw ArgumentError("weight '" + id_ + "': fiber dimension mismatch");
    switch (kind_) {
      case WeightKind::quadratic_form: {
        const auto d = static_cast<std::size_t>(n + 1);
        auto z = [&](std::size_t i) { return i == 0 ? t : x[i - 1]; };
        double acc = 0;
        for (std::size_t i = 0; i < d; ++i) {
          double row = 0;
          for (std::size_t j = 0; j < d; ++j) row += params_[i * d + j] * z(j);
          acc += z(i) * row;
        }
        if (params_.size() > d * d) {
          for (std::size_t i = 0; i < d; ++i) acc += params_[d * d + i] * z(i);
        }
        if (params_.size() == d * d + d + 1) acc += params_.back();
        return acc;
      }
      case WeightKind::max_affine: {
        const auto pieces = static_cast<std::size_t>(params_[0]);
        const auto stride = static_cast<std::size_t>(n + 2);
        double best = -kInfinity;
        for (std::size_t k = 0; k < pieces; ++k) {
          const double* row = &params_[1 + k * stride];
          double v = row[0] * t + row[n + 1];
          for (int i = 0; i < n; ++i) v += row[1 + i] * x[i];
          best = std::max(best, v);
        }
        return best;
      }
      case WeightKind::coupled_gaussian: {
        double coupled = 0, norm2 = 0;
        for (double xi : x) {
          coupled += (t - xi) * (t - xi);
          norm2 += xi * xi;
        }
        return params_[0] * coupled + params_[1] * norm2 + params_[2] * t * t * norm2;
      }
      case WeightKind::norm_power: {
        double norm2 = 0;
        for (double xi : x) norm2 += (xi - params_[1] * t) * (xi - params_[1] * t);
        return std::pow(std::sqrt(norm2), params_[0]) + params_[2] * t * t;
      }
      case WeightKind::custom_callable:
        return (*custom_)(t, x);
      case WeightKind::radial_planar:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// phi-hat(tau, z) := phi(Re tau, Re z).
  double lift_eval(std::complex<double> tau, std::span<const std::complex<double>> z) const {
    if (is_planar())
      throw ArgumentError("weight '" + id_ + "' depends on Im(tau) and has no tube lift");
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i].real();
    return eval(tau.real(), x);
  }

  double planar_eval(std::complex<double> tau) const {
    if (!is_planar()) throw ArgumentError("weight '" + id_ + "' is a tube weight; use eval or lift_eval");
    const double r = std::abs(tau - std::complex<double>(params_[2], params_[3]));
    return params_[0] * std::pow(r, params_[1]);
  }

  /// For one-dimensional fibers: points in x where phi(t, .) may fail to be
  /// smooth. Quadrature splits its panels there.
  std::vector<double> fiber_breakpoints(double t) const {
    std::vector<double> pts;
    if (!fiber_ || fiber_->dimension() != 1) return pts;
    if (kind_ == WeightKind::norm_power) {
      pts.push_back(params_[1] * t);
    } else if (kind_ == WeightKind::max_affine) {
      const auto pieces = static_cast<std::size_t>(params_[0]);
      for (std::size_t i = 0; i < pieces; ++i) {
        for (std::size_t j = i + 1; j < pieces; ++j) {
          const double* a = &params_[1 + i * 3];
          const double* b = &params_[1 + j * 3];
          const double slope = a[1] - b[1];
          if (slope != 0) pts.push_back(-((a[0] - b[0]) * t + (a[2] - b[2])) / slope);
        }
      }
    }
    return pts;
  }

private:
  WeightSpec() = default;

  static ConvexFlag check_flag(ConvexFlag supplied, ConvexFlag computed) {
    if (supplied != ConvexFlag::unknown && supplied != computed)
      throw ArgumentError("supplied convexity flag contradicts the computed one");
    return computed;
  }

  std::string id_;
  WeightKind kind_ = WeightKind::custom_callable;
  std::vector<double> params_;
  std::optional<DomainSpec> fiber_;
  ConvexFlag flag_ = ConvexFlag::unknown;
  std::shared_ptr<const TubeFunction> custom_;
};

inline double eval(const WeightSpec& spec, double t, std::span<const double> x) { return spec.eval(t, x); }

inline double lift_eval(const WeightSpec& spec, std::complex<double> tau, std::span<const std::complex<double>> z) {
  return spec.lift_eval(tau, z);
}

inline std::string_view to_string(WeightKind k) {
  switch (k) {
    case WeightKind::quadratic_form: return "quadratic-form";
    case WeightKind::max_affine: return "max-affine";
    case WeightKind::coupled_gaussian: return "coupled-gaussian";
    case WeightKind::norm_power: return "norm-power";
    case WeightKind::radial_planar: return "radial-planar";
    case WeightKind::custom_callable: return "custom-callable";
  }
  return "?";
}

inline std::string_view to_string(ConvexFlag f) {
  switch (f) {
    case ConvexFlag::convex: return "convex";
    case ConvexFlag::nonconvex: return "nonconvex";
    case ConvexFlag::unknown: return "unknown";
  }
  return "?";
}

inline std::string_view to_string(DomainShape s) {
  switch (s) {
    case DomainShape::box: return "box";
    case DomainShape::ball: return "ball";
    case DomainShape::full_space: return "full-space";
  }
  return "?";
}

/// The fixed test family. Tube entries first, planar entries last.
inline std::vector<WeightSpec> catalog() {
  const auto unit_box = DomainSpec::box({{-1.0, 1.0}});
  const auto line = DomainSpec::full_space(1);
  return {
      // Phi(t) = t^2/2 - log sqrt(pi/2)
      WeightSpec::coupled_gaussian("coupled-gaussian", 1, 1, 0, line),
      // Phi(t) = -log sqrt(pi)
      WeightSpec::quadratic_form("x2", {0, 0, 0, 1}, line),
      WeightSpec::quadratic_form("t2-plus-x2-box", {1, 0, 0, 1}, unit_box),
      // |t + x|, kink along x = -t
      WeightSpec::max_affine("max-affine-box", {{1, 1, 0}, {-1, -1, 0}}, unit_box, ConvexFlag::convex),
      // |x - t|, kink along x = t
      WeightSpec::norm_power("abs-shift-box", 1, 1, 0, unit_box, ConvexFlag::convex),
      // t^2 - t x1 + x1^2 + x2^2 on R^2: Phi(t) = 3t^2/4 - log pi
      WeightSpec::quadratic_form("quad-plane", {1, -0.5, 0, -0.5, 1, 0, 0, 0, 1}, DomainSpec::full_space(2)),
      // (t - x1)^2 + x2^2 on the unit disk
      WeightSpec::quadratic_form("shifted-disk", {1, -1, 0, -1, 1, 0, 0, 0, 1}, DomainSpec::ball(2, 1.0)),
      // Phi(t) = -t^2 - log sqrt(pi)
      WeightSpec::quadratic_form("minus-t2-plus-x2", {-1, 0, 0, 1}, line),
      // convex in x only; Phi(t) = log(1 + t^2)/2 - log sqrt(pi)
      WeightSpec::coupled_gaussian("x2-times-1-plus-t2", 0, 1, 1, line),
      WeightSpec::radial_planar("radial:abs2", 1, 2, {0, 0}, ConvexFlag::convex),
      WeightSpec::radial_planar("radial:minus-abs2", -1, 2, {0, 0}, ConvexFlag::nonconvex),
  };
}

inline std::optional<WeightSpec> find_in_catalog(std::string_view id) {
  for (auto& w : catalog()) {
    if (w.id() == id) return w;
  }
  return std::nullopt;
}

/// A weight Phi on a planar domain D, the object the minimal extension
/// property is stated for. D is C, or the open disk |tau| < domain_radius.
struct PlanarWeight {
  std::string id;
  std::function<double(std::complex<double>)> phi;
  ConvexFlag psh = ConvexFlag::unknown;
  std::optional<std::complex<double>> radial_center;
  std::optional<double> domain_radius;

  double operator()(std::complex<double> tau) const { return phi(tau); }

  bool contains_disk(std::complex<double> a, double r) const {
    return !domain_radius || std::abs(a) + r <= *domain_radius;
  }
};

inline PlanarWeight planar_weight(const WeightSpec& spec) {
  if (!spec.is_planar())
    throw ArgumentError("weight '" + spec.id() + "' is a tube weight; lift it through its marginal");
  const auto& p = spec.params();
  return PlanarWeight{spec.id(), [spec](std::complex<double> tau) { return spec.planar_eval(tau); }, spec.convex_flag(),
                      std::complex<double>(p[2], p[3]), std::nullopt};
}

inline PlanarWeight constant_weight(double c) {
  return PlanarWeight{"constant", [c](std::complex<double>) { return c; }, ConvexFlag::convex, std::nullopt,
                      std::nullopt};
}

}  // namespace prekopa
