#include "fdirnet/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fdirnet/errors.hpp"
#include "fdirnet/kernels.hpp"

namespace fdirnet {

AgentState::AgentState(std::size_t id, std::size_t dim, double rho,
                       std::vector<std::pair<std::size_t, std::size_t>> neighbors,
                       std::vector<EdgeSpec> edges)
    : id_(id), dim_(dim), rho_(rho) {
  if (!(rho > 0.0)) throw InvalidArgument("AgentState: rho must be positive");
  if (dim == 0) throw InvalidArgument("AgentState: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  x_star = Eigen::VectorXd::Zero(n);
  x_bar = Eigen::VectorXd::Zero(n);

  std::sort(neighbors.begin(), neighbors.end());
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    const auto [j, nj] = neighbors[k];
    if (j == id) throw InvalidArgument("AgentState: agent cannot neighbour itself");
    if (k > 0 && neighbors[k - 1].first == j) {
      throw InvalidArgument("AgentState: duplicate neighbour " + std::to_string(j));
    }
    if (nj == 0) throw InvalidArgument("AgentState: neighbour state length must be positive");
    NeighborLink link;
    link.agent = j;
    link.copy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nj));
    link.mu = Eigen::VectorXd::Zero(n);
    neighbors_.push_back(std::move(link));
  }

  std::sort(edges.begin(), edges.end(),
            [](const EdgeSpec& a, const EdgeSpec& b) { return a.edge < b.edge; });
  for (auto& e : edges) {
    if (e.rows == 0) throw InvalidArgument("AgentState: edge rows must be positive");
    IncidentEdge ie;
    ie.edge = e.edge;
    for (std::size_t j : e.others) {
      if (!is_neighbor(j)) {
        throw InvalidArgument("AgentState: edge " + std::to_string(e.edge) + " member " +
                              std::to_string(j) + " is not a neighbour of agent " +
                              std::to_string(id));
      }
    }
    const auto m = static_cast<Eigen::Index>(e.rows);
    ie.others = std::move(e.others);
    ie.jac_self = Eigen::MatrixXd::Zero(m, n);
    for (std::size_t j : ie.others) {
      ie.jac_others.push_back(
          Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(neighbor(j).copy.size())));
    }
    ie.residual = Eigen::VectorXd::Zero(m);
    ie.lambda = Eigen::VectorXd::Zero(m);
    edges_.push_back(std::move(ie));
  }
}

void AgentState::set_rho(double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("AgentState: rho must be positive");
  rho_ = rho;
}

IncidentEdge& AgentState::edge(std::size_t l) {
  return const_cast<IncidentEdge&>(std::as_const(*this).edge(l));
}

const IncidentEdge& AgentState::edge(std::size_t l) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), l,
                             [](const IncidentEdge& e, std::size_t v) { return e.edge < v; });
  if (it == edges_.end() || it->edge != l) {
    throw ProtocolViolation("agent " + std::to_string(id_) + ": edge " + std::to_string(l) +
                            " is not incident");
  }
  return *it;
}

NeighborLink& AgentState::neighbor(std::size_t j) {
  return const_cast<NeighborLink&>(std::as_const(*this).neighbor(j));
}

const NeighborLink& AgentState::neighbor(std::size_t j) const {
  auto it = std::lower_bound(neighbors_.begin(), neighbors_.end(), j,
                             [](const NeighborLink& n, std::size_t v) { return n.agent < v; });
  if (it == neighbors_.end() || it->agent != j) {
    throw ProtocolViolation("agent " + std::to_string(id_) + ": " + std::to_string(j) +
                            " is not a neighbour");
  }
  return *it;
}

bool AgentState::is_neighbor(std::size_t j) const noexcept {
  auto it = std::lower_bound(neighbors_.begin(), neighbors_.end(), j,
                             [](const NeighborLink& n, std::size_t v) { return n.agent < v; });
  return it != neighbors_.end() && it->agent == j;
}

void AgentState::set_linearization(const BlockMat& jacobian, const BlockVec& residual) {
  for (auto& e : edges_) {
    const Eigen::MatrixXd* self = jacobian.find(e.edge, id_);
    if (self == nullptr) {
      throw InternalError("agent " + std::to_string(id_) + ": Jacobian block (" +
                          std::to_string(e.edge) + "," + std::to_string(id_) + ") missing");
    }
    if (self->rows() != e.residual.size() || self->cols() != x_bar.size()) {
      throw InternalError("agent " + std::to_string(id_) + ": Jacobian block shape mismatch");
    }
    e.jac_self = *self;
    for (std::size_t k = 0; k < e.others.size(); ++k) {
      const Eigen::MatrixXd* other = jacobian.find(e.edge, e.others[k]);
      if (other == nullptr) {
        throw InternalError("agent " + std::to_string(id_) + ": Jacobian block (" +
                            std::to_string(e.edge) + "," + std::to_string(e.others[k]) +
                            ") missing");
      }
      e.jac_others[k] = *other;
    }
    e.residual = residual.block(e.edge);
  }
}

const Eigen::VectorXd& fresh(const Stamped& s, long expected_round, const char* what) {
  if (s.round != expected_round) {
    throw ProtocolViolation(std::string(what) + (s.round < 0 ? " never received" : " is stale") +
                            " (stamp " + std::to_string(s.round) + ", expected " +
                            std::to_string(expected_round) + ")");
  }
  return s.value;
}

Eigen::VectorXd constraint_c(const AgentState& s, std::size_t l, const Eigen::VectorXd& x_hat_i) {
  const IncidentEdge& e = s.edge(l);
  Eigen::VectorXd out;
  kernels::gemv(e.jac_self, x_hat_i, out);
  out -= e.residual;
  Eigen::VectorXd tmp;
  for (std::size_t k = 0; k < e.others.size(); ++k) {
    const NeighborLink& nb = s.neighbor(e.others[k]);
    kernels::gemv(e.jac_others[k], nb.copy, tmp);
    out += tmp;
  }
  return out;
}

Eigen::VectorXd constraint_d(const AgentState& s, std::size_t j, const Eigen::VectorXd& x_hat_i,
                             const Eigen::VectorXd& neighbor_copy_of_me) {
  s.neighbor(j);
  if (neighbor_copy_of_me.size() != x_hat_i.size()) {
    throw ProtocolViolation("constraint_d: copy length does not match agent state");
  }
  return x_hat_i - neighbor_copy_of_me;
}

ProxProblem assemble_local_problem(const AgentState& s) {
  const auto n = static_cast<Eigen::Index>(s.dim());
  Eigen::Index rows = 0;
  for (const auto& e : s.edges()) rows += e.residual.size();
  rows += n * static_cast<Eigen::Index>(s.neighbors().size());
  if (rows == 0) {
    throw InternalError("assemble_local_problem: agent " + std::to_string(s.id()) +
                        " has no constraints");
  }
  const double sr = std::sqrt(s.rho());
  const Eigen::VectorXd minus_xs = -s.x_star;

  ProxProblem p;
  p.A.resize(rows, n);
  p.b.resize(rows);
  Eigen::Index r = 0;
  for (const auto& e : s.edges()) {
    const auto m = e.residual.size();
    p.A.middleRows(r, m) = sr * e.jac_self;
    p.b.segment(r, m) = -sr * (constraint_c(s, e.edge, minus_xs) + e.lambda);
    r += m;
  }
  for (const auto& nb : s.neighbors()) {
    const auto& copy = fresh(nb.copy_of_me, s.round - 1, "copy of me");
    p.A.middleRows(r, n) = sr * Eigen::MatrixXd::Identity(n, n);
    p.b.segment(r, n) = -sr * (constraint_d(s, nb.agent, minus_xs, copy) + nb.mu);
    r += n;
  }
  return p;
}

double residual_norm(const AgentState& s) {
  const Eigen::VectorXd minus_xs = -s.x_star;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.dim()));
  Eigen::VectorXd tmp;
  for (const auto& e : s.edges()) {
    kernels::gemv_t(e.jac_self, constraint_c(s, e.edge, minus_xs) + e.lambda, tmp);
    acc += tmp;
  }
  for (const auto& nb : s.neighbors()) {
    const auto& copy = fresh(nb.copy_of_me, s.round - 1, "copy of me");
    acc += constraint_d(s, nb.agent, minus_xs, copy) + nb.mu;
  }
  return kernels::norm(acc);
}

bool primal_update_x(AgentState& s, const ProxOptions& prox) {
  if (residual_norm(s) <= 1.0 / s.rho()) {
    s.x_bar = -s.x_star;
    return true;
  }
  const ProxSolution sol = solve_prox(assemble_local_problem(s), prox);
  s.x_bar = sol.v_star - s.x_star;
  return false;
}

void primal_update_w(AgentState& s) {
  auto& nbs = s.neighbors();
  if (nbs.empty()) return;
  std::vector<Eigen::Index> offset(nbs.size() + 1, 0);
  for (std::size_t k = 0; k < nbs.size(); ++k) offset[k + 1] = offset[k] + nbs[k].copy.size();
  const Eigen::Index unknowns = offset.back();
  auto slot = [&](std::size_t agent) {
    auto it = std::lower_bound(nbs.begin(), nbs.end(), agent,
                               [](const NeighborLink& n, std::size_t v) { return n.agent < v; });
    return static_cast<std::size_t>(it - nbs.begin());
  };

  // Normal equations of the stacked least-squares problem.
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  Eigen::VectorXd own;
  for (const auto& e : s.edges()) {
    kernels::gemv(e.jac_self, s.x_bar, own);
    const Eigen::VectorXd target = -(own - e.residual + e.lambda);
    for (std::size_t a = 0; a < e.others.size(); ++a) {
      const Eigen::Index oa = offset[slot(e.others[a])];
      const auto& ra = e.jac_others[a];
      rhs.segment(oa, ra.cols()) += ra.transpose() * target;
      for (std::size_t b = 0; b < e.others.size(); ++b) {
        const Eigen::Index ob = offset[slot(e.others[b])];
        const auto& rb = e.jac_others[b];
        normal.block(oa, ob, ra.cols(), rb.cols()) += ra.transpose() * rb;
      }
    }
  }
  for (std::size_t k = 0; k < nbs.size(); ++k) {
    const auto len = nbs[k].copy.size();
    const auto& xj = fresh(nbs[k].x_bar, s.round, "neighbour x_bar");
    const auto& muj = fresh(nbs[k].mu_toward_me, s.round, "neighbour mu");
    normal.block(offset[k], offset[k], len, len).diagonal().array() += 1.0;
    rhs.segment(offset[k], len) += xj + muj;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw InternalError("primal_update_w: normal equations not positive definite");
  }
  const Eigen::VectorXd sol = llt.solve(rhs);
  for (std::size_t k = 0; k < nbs.size(); ++k) {
    nbs[k].copy = sol.segment(offset[k], nbs[k].copy.size());
  }
}

ViolationNorms dual_update(AgentState& s) {
  ViolationNorms v;
  for (auto& e : s.edges()) {
    const Eigen::VectorXd c = constraint_c(s, e.edge, s.x_bar);
    e.lambda += c;
    v.max_c = std::max(v.max_c, c.norm());
  }
  for (auto& nb : s.neighbors()) {
    const auto& copy = fresh(nb.copy_of_me, s.round, "copy of me");
    const Eigen::VectorXd d = constraint_d(s, nb.agent, s.x_bar, copy);
    nb.mu += d;
    v.max_d = std::max(v.max_d, d.norm());
  }
  return v;
}

}  // namespace fdirnet
