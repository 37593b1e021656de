#pragma once

// Centralised reference solvers for tests: ℓ2,1 basis pursuit on the
// linearised system R·v = b_lin, and brute-force minimum-support search.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fdirnet/blocklin.hpp"

namespace fdirnet {

struct LinearizedProblem {
  BlockMat R;
  BlockVec b_lin;  // r + R·x*, so that R·(x* + x̂) = b_lin

  void validate() const;
};

// Linearisation of `residual = y − Φ(q)` around the current x*.
LinearizedProblem make_linearized(const BlockMat& R, const BlockVec& residual, const BlockVec& x_star);

// Exact projection onto {v : R v = b} through an SVD pseudo-inverse.
class AffineProjector {
 public:
  // Throws Infeasible when the least-squares residual of R v = b exceeds 1e-8.
  AffineProjector(const Eigen::MatrixXd& R, const Eigen::VectorXd& b);
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  // Minimum-norm solution R⁺ b.
  const Eigen::VectorXd& particular() const noexcept { return v0_; }

 private:
  Eigen::MatrixXd R_;
  Eigen::MatrixXd pinv_;
  Eigen::VectorXd v0_;
};

inline constexpr double kOracleRho = 1.0;
inline constexpr std::size_t kOracleMaxIters = 100000;

struct L21Solution {
  BlockVec v;  // feasible (last projection)
  BlockVec z;  // block-sparse (last shrinkage)
  std::size_t iterations = 0;
};

// min ‖v‖₂,₁ s.t. R v = b_lin. Throws Infeasible, or ConvergenceFailure after
// kOracleMaxIters.
L21Solution centralized_l21(const LinearizedProblem& p, double tol = 1e-10);

inline constexpr std::size_t kBruteForceGuard = 100000;
inline constexpr double kBruteForceResidual = 1e-8;

struct SupportResult {
  bool found = false;
  std::vector<std::size_t> support;  // ascending
  BlockVec v;
  std::size_t subsets_inspected = 0;
  std::size_t minimal_supports = 0;  // feasible supports at the minimal cardinality
};

// Smallest support S (|S| <= max_support) whose restricted least-squares
// residual is <= 1e-8; ties go to the smaller ‖v‖. Throws InvalidArgument when
// the enumeration would exceed kBruteForceGuard subsets.
SupportResult brute_force_support(const LinearizedProblem& p, std::size_t max_support);

}  // namespace fdirnet
