#pragma once

// Inner ADMM over the simulated network and the outer sequential convex
// programming loop: relinearise at p̂ + x*, solve for the increment x̄, and
// accumulate x* ← x* + x̄ until the step or the measurement residual is small.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fdirnet/blocklin.hpp"
#include "fdirnet/measurements.hpp"
#include "fdirnet/netsim.hpp"
#include "fdirnet/prox.hpp"

namespace fdirnet {

struct InnerParams {
  double rho = 1.0;
  std::size_t max_inner_iters = 2000;
  double tol_primal = 1e-6;  // max ‖c‖ and ‖d‖ at exit
  double tol_dual = 1e-6;    // max per-agent change of x̄ between iterations
  ProxOptions prox;
};

struct OuterParams {
  std::size_t max_scp_iters = 20;
  double tol_step = 1e-6;  // ‖x̄‖
  double tol_meas = 1e-5;  // ‖y − Φ(p̂ + x*)‖
  // Block-norm threshold for fault identification; default_fault_tol(p̂) when unset.
  std::optional<double> fault_tol;
};

// Throws InvalidArgument on non-positive rho/tolerances or zero budgets.
void validate(const InnerParams& p);
void validate(const OuterParams& p);

struct InnerRow {
  std::size_t outer_iter = 0;
  std::size_t inner_iter = 0;
  double max_c = 0.0;
  double max_d = 0.0;
  double l21_objective = 0.0;  // ‖x* + x̄‖₂,₁
  double meas_residual = 0.0;  // at the linearisation point
  double x_change = 0.0;
  std::size_t fastpath_count = 0;
  std::vector<char> fast_path;  // per agent
};

struct OuterRow {
  std::size_t outer_iter = 0;
  std::size_t inner_iters = 0;
  bool inner_converged = false;
  double step_norm = 0.0;
  double meas_residual = 0.0;  // after the update
  double l21_objective = 0.0;  // ‖x*‖₂,₁ after the update
  std::size_t sparsity = 0;    // blocks of x* above the fault tolerance
};

struct RunTrace {
  std::vector<InnerRow> inner;
  std::vector<OuterRow> outer;
  // Outer iterations where ‖x*‖₂,₁ rose by more than 1e-6 (SCP is not monotone).
  std::size_t objective_increases = 0;
};

struct InnerResult {
  BlockVec x_bar;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<InnerRow> rows;
};

// Agents for `stack` with zero duals/copies, ordered by id.
std::vector<AgentState> make_agents(const MeasurementStack& stack, double rho);

// Runs ADMM from the agents' current state (linearisation, x*, duals and
// copies already installed). On budget exhaustion returns the iterate with the
// smallest constraint violation, flagged not converged.
InnerResult inner_admm(Network& net, const BlockStructure& blocks, const InnerParams& params,
                       std::size_t outer_iter = 0, double meas_residual = 0.0);

// Solver inputs: topology and models, self-reported states p̂, measurements y.
struct FdirProblem {
  MeasurementStack stack;
  BlockVec reported;
  BlockVec measurements;
};

struct ScpResult {
  BlockVec x_star;
  std::vector<std::size_t> faults;
  RunTrace trace;
  bool degraded = false;
  std::size_t outer_iters = 0;
  std::size_t inner_iters = 0;
  double meas_residual = 0.0;
  double fault_tol = 0.0;
};

// Throws DomainViolation (with the offending iterate in the message) if
// p̂ + x* leaves the measurement domain.
ScpResult outer_scp(const FdirProblem& problem, const InnerParams& inner, const OuterParams& outer,
                    std::size_t threads = 0);

// support(x*, fault_tol). Throws InvalidArgument for fault_tol <= 0.
std::vector<std::size_t> identify_faults(const BlockVec& x_star, double fault_tol);

// max(1e-3, 1e-3 * median block norm of p̂).
double default_fault_tol(const BlockVec& reported);

// Columns: outer_iter,inner_iter,max_c_norm,max_d_norm,l21_objective,meas_residual,fastpath_count
void write_inner_trace_csv(std::ostream& os, const std::vector<InnerRow>& rows);
// Columns: outer_iter,inner_iters,inner_converged,step_norm,meas_residual,l21_objective,sparsity
void write_outer_trace_csv(std::ostream& os, const std::vector<OuterRow>& rows);

}  // namespace fdirnet
