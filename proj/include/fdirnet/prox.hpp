#pragma once

// Minimisation of f(v) = ‖v‖ + ½‖Av − b‖².
//
// The minimiser is v* = 0 exactly when ‖Aᵀb‖ ≤ 1. Otherwise v* ≠ 0 is the
// unique solution of AᵀA v + v/‖v‖ = Aᵀb, and ‖v*‖ ≥ (‖Aᵀb‖ − 1)/λ_max(AᵀA),
// so f is smooth on a ball-complement around v*. solve_prox exploits this:
// it never iterates in the zero case and runs accelerated gradient descent on
// the smooth region in the other.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fdirnet {

struct ProxProblem {
  Eigen::MatrixXd A;  // o x n
  Eigen::VectorXd b;  // o
};

// Throws InvalidArgument unless o, n >= 1, b has o entries and all are finite.
void validate(const ProxProblem& p);

enum class ProxCase { Zero, Interior };

struct ProxSolution {
  Eigen::VectorXd v_star;
  ProxCase kase = ProxCase::Zero;
  double stationarity_residual = 0.0;
  std::size_t iterations = 0;
  // Residual of the seed, then after each iteration; filled only when requested.
  std::vector<double> residual_history;
};

enum class DescentMethod { Nesterov, Gradient };

struct ProxOptions {
  double tol = 1e-9;
  std::size_t max_iters = 50000;
  DescentMethod method = DescentMethod::Nesterov;
  bool record_history = false;
  // Starting point for the interior case; the closed-form seed is used when empty.
  Eigen::VectorXd initial;
};

// ‖Aᵀb‖ ≤ 1.
bool zero_test(const ProxProblem& p);

// ‖AᵀA v + v/‖v‖ − Aᵀb‖. Throws InvalidArgument at v = 0.
double stationarity_residual(const ProxProblem& p, const Eigen::VectorXd& v);

double objective(const ProxProblem& p, const Eigen::VectorXd& v);

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration (tol 1e-10 relative, at most 10 000 steps).
double lambda_max(const Eigen::MatrixXd& gram);

// Throws ConvergenceFailure (carrying the best iterate) when the budget runs
// out before the stationarity residual reaches tol.
ProxSolution solve_prox(const ProxProblem& p, const ProxOptions& options = {});

}  // namespace fdirnet
