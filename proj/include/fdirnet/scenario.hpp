#pragma once

// Scenario files (JSON) and the fault report built from a solver run.
//
// {
//   "description": "...",            optional
//   "dimension": 2,
//   "seed": 7,
//   "agents": [{"id": 0, "true_state": [x, y], "reported_state": [x, y]}, ...],
//   "edges":  [{"kind": "distance", "members": [0, 1], "sigma": 0.0}, ...],
//   "solver": {"rho": 1.0, "max_inner_iters": 2000, "tol_primal": 1e-6, "tol_dual": 1e-6,
//              "max_scp_iters": 20, "tol_step": 1e-6, "tol_meas": 1e-5, "fault_tol": 1e-3}
// }
//
// Agent ids must be 0..n-1 (any order). reported_state defaults to
// true_state; sigma defaults to 0; every solver key is optional.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdirnet/solver.hpp"
#include "fdirnet/topology.hpp"

namespace fdirnet {

struct ScenarioAgent {
  std::size_t id = 0;
  Eigen::VectorXd true_state;
  Eigen::VectorXd reported_state;
};

struct ScenarioEdge {
  MeasurementKind kind = MeasurementKind::Distance;
  std::vector<std::size_t> members;
  double sigma = 0.0;
};

struct Scenario {
  std::string description;
  std::size_t dimension = 2;
  std::uint64_t seed = 0;
  std::vector<ScenarioAgent> agents;  // sorted by id
  std::vector<ScenarioEdge> edges;
  InnerParams inner;
  OuterParams outer;

  Hypergraph graph() const;
  MeasurementStack stack() const;
  BlockVec true_states() const;
  BlockVec reported_states() const;
  // Φ(true states) plus per-edge Gaussian noise drawn from mt19937_64(seed).
  BlockVec measurements() const;
  // Solver inputs only: topology, p̂ and y.
  FdirProblem problem() const;
};

bool operator==(const Scenario& a, const Scenario& b);

// Throws ScenarioError naming the offending field path, or DomainViolation if
// the true configuration is outside the measurement domain.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

struct FaultReport {
  std::vector<std::size_t> identified;
  std::vector<Eigen::VectorXd> error_blocks;  // x*[i]
  std::vector<double> error_norms;
  double meas_residual = 0.0;
  std::size_t outer_iters = 0;
  std::size_t inner_iters = 0;
  bool degraded = false;
  double fault_tol = 0.0;
  // Ground-truth comparison.
  std::vector<std::size_t> true_faults;
  double precision = 1.0;
  double recall = 1.0;
  double max_reconstruction_error = 0.0;
};

FaultReport make_report(const Scenario& s, const ScpResult& r);
void write_report(std::ostream& os, const FaultReport& r);

}  // namespace fdirnet
