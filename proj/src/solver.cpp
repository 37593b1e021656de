#include "fdirnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "fdirnet/errors.hpp"

namespace fdirnet {

void validate(const InnerParams& p) {
  if (!(p.rho > 0.0)) throw InvalidArgument("inner: rho must be positive");
  if (p.max_inner_iters == 0) throw InvalidArgument("inner: max_inner_iters must be positive");
  if (!(p.tol_primal > 0.0) || !(p.tol_dual > 0.0)) {
    throw InvalidArgument("inner: tolerances must be positive");
  }
}

void validate(const OuterParams& p) {
  if (p.max_scp_iters == 0) throw InvalidArgument("outer: max_scp_iters must be positive");
  if (!(p.tol_step > 0.0) || !(p.tol_meas > 0.0)) {
    throw InvalidArgument("outer: tolerances must be positive");
  }
  if (p.fault_tol && !(*p.fault_tol > 0.0)) {
    throw InvalidArgument("outer: fault_tol must be positive");
  }
}

std::vector<AgentState> make_agents(const MeasurementStack& stack, double rho) {
  const Hypergraph& g = stack.graph();
  const NeighborTables tables = build_tables(g);
  std::vector<AgentState> agents;
  agents.reserve(g.vertex_count());
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> nbs;
    for (std::size_t j : tables.neighbors[i]) nbs.emplace_back(j, stack.dim());
    std::vector<EdgeSpec> edges;
    for (std::size_t l : tables.incident[i]) {
      EdgeSpec spec;
      spec.edge = l;
      for (std::size_t m : g.edge(l).members) {
        if (m != i) spec.others.push_back(m);
      }
      spec.rows = stack.row_structure().length(l);
      edges.push_back(std::move(spec));
    }
    agents.emplace_back(i, stack.dim(), rho, std::move(nbs), std::move(edges));
  }
  return agents;
}

namespace {

BlockVec gather_x_bar(const Network& net, const BlockStructure& blocks) {
  BlockVec x(blocks);
  for (const auto& a : net.agents()) x.block(a.id()) = a.x_bar;
  return x;
}

double l21_total(const Network& net) {
  double s = 0.0;
  for (const auto& a : net.agents()) s += (a.x_star + a.x_bar).norm();
  return s;
}

}  // namespace

InnerResult inner_admm(Network& net, const BlockStructure& blocks, const InnerParams& params,
                       std::size_t outer_iter, double meas_residual) {
  validate(params);
  if (blocks.num_blocks() != net.size()) {
    throw InvalidArgument("inner_admm: block structure does not match network size");
  }
  for (auto& a : net.agents()) {
    a.set_rho(params.rho);
    a.x_bar.setZero();
  }

  InnerResult res;
  net.reset_round();
  net.run_phase(Phase::Sync);

  BlockVec prev(blocks);
  BlockVec best(blocks);
  double best_violation = std::numeric_limits<double>::infinity();

  for (std::size_t t = 1; t <= params.max_inner_iters; ++t) {
    const PhaseOutcome primal = net.run_phase(Phase::Primal, params.prox);
    net.run_phase(Phase::Copies);
    const PhaseOutcome dual = net.run_phase(Phase::Dual);

    InnerRow row;
    row.outer_iter = outer_iter;
    row.inner_iter = t;
    row.meas_residual = meas_residual;
    row.fast_path = primal.fast_path;
    row.fastpath_count = static_cast<std::size_t>(
        std::count(primal.fast_path.begin(), primal.fast_path.end(), 1));
    for (const auto& v : dual.violations) {
      row.max_c = std::max(row.max_c, v.max_c);
      row.max_d = std::max(row.max_d, v.max_d);
    }
    row.l21_objective = l21_total(net);
    BlockVec current = gather_x_bar(net, blocks);
    for (std::size_t i = 0; i < blocks.num_blocks(); ++i) {
      row.x_change = std::max(row.x_change, (current.block(i) - prev.block(i)).norm());
    }
    res.rows.push_back(row);
    res.iterations = t;

    const double violation = std::max(row.max_c, row.max_d);
    if (violation < best_violation) {
      best_violation = violation;
      best = current;
    }
    prev = std::move(current);

    if (row.max_c <= params.tol_primal && row.max_d <= params.tol_primal &&
        row.x_change <= params.tol_dual) {
      res.converged = true;
      break;
    }
  }
  res.x_bar = res.converged ? std::move(prev) : std::move(best);
  return res;
}

std::vector<std::size_t> identify_faults(const BlockVec& x_star, double fault_tol) {
  if (!(fault_tol > 0.0)) throw InvalidArgument("identify_faults: fault_tol must be positive");
  return support(x_star, fault_tol);
}

double default_fault_tol(const BlockVec& reported) {
  std::vector<double> norms;
  for (std::size_t i = 0; i < reported.num_blocks(); ++i) norms.push_back(reported.block_norm(i));
  if (norms.empty()) return 1e-3;
  std::sort(norms.begin(), norms.end());
  const std::size_t n = norms.size();
  const double median = n % 2 == 1 ? norms[n / 2] : 0.5 * (norms[n / 2 - 1] + norms[n / 2]);
  return std::max(1e-3, 1e-3 * median);
}

namespace {

BlockVec measure(const FdirProblem& pr, const BlockVec& x_star, std::size_t outer_iter) {
  BlockVec q(pr.reported.structure(), pr.reported.data() + x_star.data());
  try {
    return eval_stack(pr.stack, q);
  } catch (const DomainViolation& e) {
    std::ostringstream os;
    os << "outer iteration " << outer_iter << ": estimate left the measurement domain ("
       << e.what() << "); p_hat + x* =";
    for (Eigen::Index k = 0; k < q.data().size(); ++k) os << ' ' << q.data()(k);
    throw DomainViolation(os.str(), e.edge());
  }
}

}  // namespace

ScpResult outer_scp(const FdirProblem& pr, const InnerParams& inner, const OuterParams& outer,
                    std::size_t threads) {
  validate(inner);
  validate(outer);
  const BlockStructure& cols = pr.stack.col_structure();
  if (!(pr.reported.structure() == cols) ||
      !(pr.measurements.structure() == pr.stack.row_structure())) {
    throw InvalidArgument("outer_scp: p_hat / y do not match the measurement stack");
  }

  ScpResult out;
  out.x_star = BlockVec(cols);
  out.fault_tol = outer.fault_tol.value_or(default_fault_tol(pr.reported));

  Network net(make_agents(pr.stack, inner.rho), threads);
  BlockVec y_hat = measure(pr, out.x_star, 0);
  double prev_objective = 0.0;
  bool stopped = false;
  bool last_converged = true;

  for (std::size_t it = 1; it <= outer.max_scp_iters; ++it) {
    BlockVec q(cols, pr.reported.data() + out.x_star.data());
    BlockVec r(pr.stack.row_structure(), pr.measurements.data() - y_hat.data());
    const double meas_before = r.data().norm();
    BlockMat jac;
    try {
      jac = jacobian_stack(pr.stack, q);
    } catch (const DomainViolation& e) {
      std::ostringstream os;
      os << "outer iteration " << it << ": cannot relinearise (" << e.what()
         << "); p_hat + x* =";
      for (Eigen::Index k = 0; k < q.data().size(); ++k) os << ' ' << q.data()(k);
      throw DomainViolation(os.str(), e.edge());
    }
    for (auto& a : net.agents()) {
      a.set_linearization(jac, r);
      a.x_star = out.x_star.block(a.id());
    }

    InnerResult ir = inner_admm(net, cols, inner, it, meas_before);
    out.inner_iters += ir.iterations;
    last_converged = ir.converged;
    for (auto& row : ir.rows) out.trace.inner.push_back(std::move(row));

    out.x_star.data() += ir.x_bar.data();
    // The increment is absorbed into x*; re-centre copies on the new zero.
    for (auto& a : net.agents()) {
      for (auto& nb : a.neighbors()) {
        if (nb.x_bar.round >= 0) nb.copy -= nb.x_bar.value;
      }
    }

    y_hat = measure(pr, out.x_star, it);
    OuterRow orow;
    orow.outer_iter = it;
    orow.inner_iters = ir.iterations;
    orow.inner_converged = ir.converged;
    orow.step_norm = ir.x_bar.data().norm();
    orow.meas_residual = (pr.measurements.data() - y_hat.data()).norm();
    orow.l21_objective = norm_2q(out.x_star, 1.0);
    orow.sparsity = block_sparsity(out.x_star, out.fault_tol);
    if (it > 1 && orow.l21_objective > prev_objective + 1e-6) ++out.trace.objective_increases;
    prev_objective = orow.l21_objective;
    out.trace.outer.push_back(orow);
    out.outer_iters = it;
    out.meas_residual = orow.meas_residual;

    if (orow.step_norm <= outer.tol_step || orow.meas_residual <= outer.tol_meas) {
      stopped = true;
      break;
    }
  }

  out.degraded = !stopped || !last_converged;
  out.faults = identify_faults(out.x_star, out.fault_tol);
  return out;
}

void write_inner_trace_csv(std::ostream& os, const std::vector<InnerRow>& rows) {
  os << "outer_iter,inner_iter,max_c_norm,max_d_norm,l21_objective,meas_residual,fastpath_count\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.outer_iter << ',' << r.inner_iter << ',' << r.max_c << ',' << r.max_d << ','
       << r.l21_objective << ',' << r.meas_residual << ',' << r.fastpath_count << '\n';
  }
  os.precision(old);
}

void write_outer_trace_csv(std::ostream& os, const std::vector<OuterRow>& rows) {
  os << "outer_iter,inner_iters,inner_converged,step_norm,meas_residual,l21_objective,sparsity\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.outer_iter << ',' << r.inner_iters << ',' << (r.inner_converged ? 1 : 0) << ','
       << r.step_norm << ',' << r.meas_residual << ',' << r.l21_objective << ',' << r.sparsity
       << '\n';
  }
  os.precision(old);
}

}  // namespace fdirnet
