#pragma once

// Inter-agent measurement models, the stacked measurement map, its block
// Jacobian, and rank diagnostics of the search space.
//
// Agent states are positions in R^d. For an edge with ordered members
// (i, j[, k]):
//   displacement     p_i - p_j
//   distance         |p_i - p_j|
//   bearing          (p_i - p_j) / |p_i - p_j|
//   tdoa             |p_i - p_j| - |p_i - p_k|
//   subtended angle  arccos(u_ij . u_ik),  u_ab = (p_a - p_b) / |p_a - p_b|

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fdirnet/blocklin.hpp"
#include "fdirnet/errors.hpp"
#include "fdirnet/topology.hpp"

namespace fdirnet {

// Separations below this are treated as coincident positions.
inline constexpr double kDomainFloor = 1e-9;
// Singular values <= kRankTol * sigma_max count as zero.
inline constexpr double kRankTol = 1e-10;

// Throws DomainViolation (edge index = `edge`) on coincident members.
Eigen::VectorXd eval_edge(MeasurementKind kind, std::size_t dim,
                          std::span<const Eigen::VectorXd> states,
                          std::size_t edge = DomainViolation::kNoEdge);

// One m_l x d block per member, in member order.
std::vector<Eigen::MatrixXd> edge_jacobian(MeasurementKind kind, std::size_t dim,
                                           std::span<const Eigen::VectorXd> states,
                                           std::size_t edge = DomainViolation::kNoEdge);

class MeasurementStack {
 public:
  MeasurementStack() = default;
  // Throws InvalidArgument when an edge's cardinality differs from its
  // kind's arity, or dim == 0.
  MeasurementStack(Hypergraph graph, std::size_t dim);

  const Hypergraph& graph() const noexcept { return graph_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t agent_count() const noexcept { return graph_.vertex_count(); }

  // Blocks m_1..m_|E|.
  const BlockStructure& row_structure() const noexcept { return rows_; }
  // Blocks n_i = d for every agent.
  const BlockStructure& col_structure() const noexcept { return cols_; }

 private:
  Hypergraph graph_;
  std::size_t dim_ = 0;
  BlockStructure rows_;
  BlockStructure cols_;
};

BlockVec eval_stack(const MeasurementStack& stack, const BlockVec& p);
BlockMat jacobian_stack(const MeasurementStack& stack, const BlockVec& p);

// Largest per-block relative discrepancy ‖J_fd - J‖_F / max(‖J‖_F, 1)
// between the analytic Jacobian and central differences with the given step.
double jacobian_fd_check(const MeasurementStack& stack, const BlockVec& p, double step);

struct RankReport {
  std::size_t rows = 0;       // m
  std::size_t cols = 0;       // n
  std::size_t rank = 0;       // k
  std::size_t dimension = 0;  // n - k
  std::vector<double> singular_values;  // descending
};

RankReport search_space_dim(const BlockMat& jacobian);

// Full row rank.
bool regular_point_check(const BlockMat& jacobian);

}  // namespace fdirnet
