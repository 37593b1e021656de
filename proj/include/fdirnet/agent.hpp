#pragma once

// Per-agent ADMM state and local updates.
//
// Agent i owns its error increment x̂[i] (output x̄[i] of the primal step),
// copies w[j] ≈ x̂[j] of every neighbour's increment, and scaled duals for
//   c_l(x̂[i]) = R[l,i] x̂[i] + Σ_{j ∈ E^(l)\{i}} R[l,j] w[j] − r[l]   (l ∈ E_i)
//   d_j(x̂[i]) = x̂[i] − w_j^(i)                                        (j ∈ N_i)
// where w_j^(i) is neighbour j's copy of agent i. The primal step minimises
//   ‖x*[i] + x̂[i]‖ + ρ/2 Σ_l ‖c_l + λ̃_l‖² + ρ/2 Σ_j ‖d_j + μ̃_j‖²
// and reduces to a prox problem in v = x*[i] + x̂[i].
//
// Round protocol: `round` is the current inner iteration t (0 before the
// first). Copies of me used by the primal step must carry stamp t−1; neighbour
// x̄/μ̃ used by the copy step and copies used by the dual step carry stamp t.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fdirnet/blocklin.hpp"
#include "fdirnet/prox.hpp"

namespace fdirnet {

struct Stamped {
  Eigen::VectorXd value;
  long round = -1;  // -1: never received
};

struct IncidentEdge {
  std::size_t edge = 0;                    // l
  std::vector<std::size_t> others;         // E^(l) \ {i}, member order
  Eigen::MatrixXd jac_self;                // R[l,i]
  std::vector<Eigen::MatrixXd> jac_others; // R[l,j], aligned with `others`
  Eigen::VectorXd residual;                // r[l]
  Eigen::VectorXd lambda;                  // λ̃_i^(l)
};

struct NeighborLink {
  std::size_t agent = 0;      // j
  Eigen::VectorXd copy;       // w_i^(j), length n_j
  Eigen::VectorXd mu;         // μ̃_i^(j), length n_i
  Stamped copy_of_me;         // w_j^(i), length n_i
  Stamped x_bar;              // x̄[j]
  Stamped mu_toward_me;       // μ̃_j^(i), length n_j
};

struct EdgeSpec {
  std::size_t edge = 0;
  std::vector<std::size_t> others;  // E^(l) \ {i}, member order
  std::size_t rows = 0;             // m_l
};

class AgentState {
 public:
  // `neighbors`: (id, state length) pairs. Every id in an edge's `others`
  // must be a neighbour. Throws InvalidArgument otherwise, or if rho <= 0.
  AgentState(std::size_t id, std::size_t dim, double rho,
             std::vector<std::pair<std::size_t, std::size_t>> neighbors,
             std::vector<EdgeSpec> edges);

  std::size_t id() const noexcept { return id_; }
  std::size_t dim() const noexcept { return dim_; }
  double rho() const noexcept { return rho_; }
  void set_rho(double rho);

  long round = 0;
  Eigen::VectorXd x_star;  // x*[i]
  Eigen::VectorXd x_bar;   // x̄[i]

  std::vector<IncidentEdge>& edges() noexcept { return edges_; }
  const std::vector<IncidentEdge>& edges() const noexcept { return edges_; }
  std::vector<NeighborLink>& neighbors() noexcept { return neighbors_; }
  const std::vector<NeighborLink>& neighbors() const noexcept { return neighbors_; }

  // Throw ProtocolViolation when l ∉ E_i / j ∉ N_i.
  IncidentEdge& edge(std::size_t l);
  const IncidentEdge& edge(std::size_t l) const;
  NeighborLink& neighbor(std::size_t j);
  const NeighborLink& neighbor(std::size_t j) const;
  bool is_neighbor(std::size_t j) const noexcept;

  // Installs R[l,·] and r[l] for every incident edge.
  void set_linearization(const BlockMat& jacobian, const BlockVec& residual);

 private:
  std::size_t id_;
  std::size_t dim_;
  double rho_;
  std::vector<IncidentEdge> edges_;
  std::vector<NeighborLink> neighbors_;
};

// Throws ProtocolViolation if the stamp differs from `expected_round`.
const Eigen::VectorXd& fresh(const Stamped& s, long expected_round, const char* what);

Eigen::VectorXd constraint_c(const AgentState& s, std::size_t l, const Eigen::VectorXd& x_hat_i);

Eigen::VectorXd constraint_d(const AgentState& s, std::size_t j, const Eigen::VectorXd& x_hat_i,
                             const Eigen::VectorXd& neighbor_copy_of_me);

// A_i = √ρ [R[l,i] ...; I ...], b_i = −√ρ [c_l(−x*) + λ̃_l ...; d_j(−x*) + μ̃_j ...].
// Uses copies of me stamped round−1. Throws InternalError for an agent with
// no edges and no neighbours (nothing to stack).
ProxProblem assemble_local_problem(const AgentState& s);

// ‖Σ_l R[l,i]ᵀ(c_l(−x*) + λ̃_l) + Σ_j (d_j(−x*) + μ̃_j)‖, i.e. ‖A_iᵀb_i‖/ρ.
double residual_norm(const AgentState& s);

// Primal step for x̂[i]. Returns true when the threshold residual_norm ≤ 1/ρ
// fired and x̄[i] = −x*[i] was set without solving.
bool primal_update_x(AgentState& s, const ProxOptions& prox = {});

// Jointly re-solves the copies {w[j]} given neighbour x̄/μ̃ stamped `round`.
void primal_update_w(AgentState& s);

struct ViolationNorms {
  double max_c = 0.0;
  double max_d = 0.0;
};

// λ̃_l += c_l(x̄[i]); μ̃_j += d_j(x̄[i]) with copies of me stamped `round`.
ViolationNorms dual_update(AgentState& s);

}  // namespace fdirnet
