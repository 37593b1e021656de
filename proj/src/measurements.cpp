#include "fdirnet/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdirnet/errors.hpp"

namespace fdirnet {

namespace {

struct Separation {
  Eigen::VectorXd unit;
  double length;
};

Separation separation(const Eigen::VectorXd& a, const Eigen::VectorXd& b, std::size_t edge) {
  Eigen::VectorXd diff = a - b;
  const double len = diff.norm();
  if (!(len >= kDomainFloor)) {
    std::string where = edge == DomainViolation::kNoEdge ? std::string("measurement")
                                                         : "edge " + std::to_string(edge);
    throw DomainViolation(where + ": coincident agent positions (separation " +
                              std::to_string(len) + ")",
                          edge);
  }
  return {diff / len, len};
}

void check_states(MeasurementKind kind, std::size_t dim, std::span<const Eigen::VectorXd> states) {
  if (states.size() != arity(kind)) {
    throw InvalidArgument("measurement " + std::string(to_string(kind)) + " expects " +
                          std::to_string(arity(kind)) + " member states, got " +
                          std::to_string(states.size()));
  }
  for (const auto& s : states) {
    if (static_cast<std::size_t>(s.size()) != dim) {
      throw InvalidArgument("measurement: state length does not match dimension");
    }
  }
}

// (I - u u^T) / len
Eigen::MatrixXd projector(const Separation& s) {
  const auto d = s.unit.size();
  return (Eigen::MatrixXd::Identity(d, d) - s.unit * s.unit.transpose()) / s.length;
}

}  // namespace

Eigen::VectorXd eval_edge(MeasurementKind kind, std::size_t dim,
                          std::span<const Eigen::VectorXd> states, std::size_t edge) {
  check_states(kind, dim, states);
  const auto& pi = states[0];
  const auto& pj = states[1];
  Eigen::VectorXd out(static_cast<Eigen::Index>(output_dim(kind, dim)));
  switch (kind) {
    case MeasurementKind::Displacement:
      out = pi - pj;
      break;
    case MeasurementKind::Distance:
      out(0) = separation(pi, pj, edge).length;
      break;
    case MeasurementKind::Bearing:
      out = separation(pi, pj, edge).unit;
      break;
    case MeasurementKind::TDoA:
      out(0) = separation(pi, pj, edge).length - separation(pi, states[2], edge).length;
      break;
    case MeasurementKind::SubtendedAngle: {
      const double c = separation(pi, pj, edge).unit.dot(separation(pi, states[2], edge).unit);
      out(0) = std::acos(std::clamp(c, -1.0, 1.0));
      break;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> edge_jacobian(MeasurementKind kind, std::size_t dim,
                                           std::span<const Eigen::VectorXd> states,
                                           std::size_t edge) {
  check_states(kind, dim, states);
  const auto d = static_cast<Eigen::Index>(dim);
  const auto& pi = states[0];
  const auto& pj = states[1];
  std::vector<Eigen::MatrixXd> blocks;
  switch (kind) {
    case MeasurementKind::Displacement:
      blocks.push_back(Eigen::MatrixXd::Identity(d, d));
      blocks.push_back(-Eigen::MatrixXd::Identity(d, d));
      break;
    case MeasurementKind::Distance: {
      const auto s = separation(pi, pj, edge);
      blocks.push_back(s.unit.transpose());
      blocks.push_back(-s.unit.transpose());
      break;
    }
    case MeasurementKind::Bearing: {
      Eigen::MatrixXd p = projector(separation(pi, pj, edge));
      blocks.push_back(p);
      blocks.push_back(-p);
      break;
    }
    case MeasurementKind::TDoA: {
      const auto sj = separation(pi, pj, edge);
      const auto sk = separation(pi, states[2], edge);
      blocks.push_back((sj.unit - sk.unit).transpose());
      blocks.push_back(-sj.unit.transpose());
      blocks.push_back(sk.unit.transpose());
      break;
    }
    case MeasurementKind::SubtendedAngle: {
      const auto sj = separation(pi, pj, edge);
      const auto sk = separation(pi, states[2], edge);
      const double c = sj.unit.dot(sk.unit);
      if (std::abs(c) >= 1.0 - kDomainFloor) {
        throw DomainViolation("edge " + std::to_string(edge) +
                                  ": subtended angle is degenerate (collinear members)",
                              edge);
      }
      const double scale = -1.0 / std::sqrt(1.0 - c * c);
      Eigen::VectorXd dj = projector(sj) * sk.unit;  // d c / d p_j = -dj
      Eigen::VectorXd dk = projector(sk) * sj.unit;  // d c / d p_k = -dk
      blocks.push_back(scale * (dj + dk).transpose());
      blocks.push_back(-scale * dj.transpose());
      blocks.push_back(-scale * dk.transpose());
      break;
    }
  }
  return blocks;
}

MeasurementStack::MeasurementStack(Hypergraph graph, std::size_t dim)
    : graph_(std::move(graph)), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("MeasurementStack: dimension must be positive");
  std::vector<std::size_t> rows;
  rows.reserve(graph_.edge_count());
  for (std::size_t l = 0; l < graph_.edge_count(); ++l) {
    const auto& e = graph_.edge(l);
    if (e.members.size() != arity(e.kind)) {
      throw InvalidArgument("edge " + std::to_string(l) + ": " + std::string(to_string(e.kind)) +
                            " needs " + std::to_string(arity(e.kind)) + " members, got " +
                            std::to_string(e.members.size()));
    }
    rows.push_back(output_dim(e.kind, dim_));
  }
  rows_ = BlockStructure(std::move(rows));
  cols_ = BlockStructure::uniform(graph_.vertex_count(), dim_);
}

namespace {

std::vector<Eigen::VectorXd> member_states(const Hyperedge& e, const BlockVec& p) {
  std::vector<Eigen::VectorXd> s;
  s.reserve(e.members.size());
  for (std::size_t m : e.members) s.emplace_back(p.block(m));
  return s;
}

void check_config(const MeasurementStack& stack, const BlockVec& p) {
  if (!(p.structure() == stack.col_structure())) {
    throw InvalidArgument("configuration structure does not match the measurement stack");
  }
}

}  // namespace

BlockVec eval_stack(const MeasurementStack& stack, const BlockVec& p) {
  check_config(stack, p);
  BlockVec y(stack.row_structure());
  for (std::size_t l = 0; l < stack.graph().edge_count(); ++l) {
    const auto& e = stack.graph().edge(l);
    const auto states = member_states(e, p);
    y.block(l) = eval_edge(e.kind, stack.dim(), states, l);
  }
  return y;
}

BlockMat jacobian_stack(const MeasurementStack& stack, const BlockVec& p) {
  check_config(stack, p);
  BlockMat r(stack.row_structure(), stack.col_structure());
  for (std::size_t l = 0; l < stack.graph().edge_count(); ++l) {
    const auto& e = stack.graph().edge(l);
    const auto states = member_states(e, p);
    auto blocks = edge_jacobian(e.kind, stack.dim(), states, l);
    for (std::size_t a = 0; a < e.members.size(); ++a) r.set(l, e.members[a], std::move(blocks[a]));
  }
  return r;
}

double jacobian_fd_check(const MeasurementStack& stack, const BlockVec& p, double step) {
  if (!(step > 0.0)) throw InvalidArgument("jacobian_fd_check: step must be positive");
  const BlockMat analytic = jacobian_stack(stack, p);
  const Eigen::MatrixXd dense = analytic.to_dense();
  Eigen::MatrixXd fd(dense.rows(), dense.cols());
  BlockVec q = p;
  for (Eigen::Index c = 0; c < dense.cols(); ++c) {
    const double x = p.data()(c);
    const double xp = x + step;
    const double xm = x - step;
    q.data()(c) = xp;
    const Eigen::VectorXd yp = eval_stack(stack, q).data();
    q.data()(c) = xm;
    const Eigen::VectorXd ym = eval_stack(stack, q).data();
    q.data()(c) = x;
    fd.col(c) = (yp - ym) / (xp - xm);
  }
  const auto& rows = stack.row_structure();
  const auto& cols = stack.col_structure();
  double worst = 0.0;
  for (std::size_t l = 0; l < rows.num_blocks(); ++l) {
    for (std::size_t i = 0; i < cols.num_blocks(); ++i) {
      const auto ro = static_cast<Eigen::Index>(rows.offset(l));
      const auto co = static_cast<Eigen::Index>(cols.offset(i));
      const auto rl = static_cast<Eigen::Index>(rows.length(l));
      const auto cl = static_cast<Eigen::Index>(cols.length(i));
      const Eigen::MatrixXd a = dense.block(ro, co, rl, cl);
      const Eigen::MatrixXd f = fd.block(ro, co, rl, cl);
      worst = std::max(worst, (f - a).norm() / std::max(a.norm(), 1.0));
    }
  }
  return worst;
}

RankReport search_space_dim(const BlockMat& jacobian) {
  RankReport rep;
  const Eigen::MatrixXd dense = jacobian.to_dense();
  rep.rows = static_cast<std::size_t>(dense.rows());
  rep.cols = static_cast<std::size_t>(dense.cols());
  if (dense.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    const Eigen::VectorXd sv = svd.singularValues();
    rep.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    for (double s : rep.singular_values) {
      if (smax > 0.0 && s > kRankTol * smax) ++rep.rank;
    }
  }
  rep.dimension = rep.cols - rep.rank;
  return rep;
}

bool regular_point_check(const BlockMat& jacobian) {
  const auto rep = search_space_dim(jacobian);
  return rep.rank == rep.rows;
}

}  // namespace fdirnet
