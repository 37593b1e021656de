#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fdirnet {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A state configuration outside the measurement domain (coincident agents,
// degenerate angles). `edge` is the offending hyperedge index, if known.
class DomainViolation : public Error {
 public:
  static constexpr std::size_t kNoEdge = static_cast<std::size_t>(-1);

  explicit DomainViolation(const std::string& what, std::size_t edge = kNoEdge)
      : Error(what), edge_(edge) {}

  std::size_t edge() const noexcept { return edge_; }

 private:
  std::size_t edge_;
};

// An agent read data it was not entitled to, or data that was missing/stale
// for the current round.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted. Carries the best iterate seen and its residual.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, Eigen::VectorXd best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}

  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

// Scenario parse/validation failure; `path` names the offending field.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace fdirnet
