#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prekopa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, malformed specs, invalid parameters.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// An integrand produced NaN at a quadrature node.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, std::vector<double> node)
    : Error(what), node_(std::move(node)) {}
  const std::vector<double>& node() const noexcept { return node_; }

private:
  std::vector<double> node_;
};

/// The exhaustion sequence did not settle before the ball cap.
class TruncationError : public Error {
public:
  TruncationError(const std::string& what, std::vector<double> trace)
    : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

/// A fiber integral diverged (marginal would be -infinity).
class DivergenceError : public Error {
public:
  using Error::Error;
};

/// A fiber integral vanished (marginal would be +infinity).
class InfiniteMarginalError : public Error {
public:
  using Error::Error;
};

/// Non-positive pivot while factoring a Gram matrix.
class ConditioningError : public Error {
public:
  ConditioningError(const std::string& what, int degree) : Error(what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

private:
  int degree_;
};

class DomainError : public Error {
public:
  using Error::Error;
};

/// Sample grid does not cover the support it is supposed to cover.
class CoverageError : public Error {
public:
  using Error::Error;
};

/// A constants audit or Young-type bound failed.
class AuditError : public Error {
public:
  using Error::Error;
};

/// The Jensen / mean-value chain broke beyond tolerance.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// Config document problem, anchored at a line (0 when not line-specific).
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace prekopa
