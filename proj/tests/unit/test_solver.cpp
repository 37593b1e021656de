#include <doctest.h>

#include <sstream>

#include "fdirnet/errors.hpp"
#include "fdirnet/measurements.hpp"
#include "fdirnet/oracle.hpp"
#include "fdirnet/solver.hpp"
#include "testutil.hpp"

using namespace fdirnet;

namespace {

MeasurementStack dense_stack(std::size_t n) {
  std::vector<Hyperedge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({MeasurementKind::Distance, {i, j}});
  edges.push_back({MeasurementKind::Displacement, {0, 1}});
  return MeasurementStack(Hypergraph(n, edges), 2);
}

BlockVec positions(testutil::Rng& rng, std::size_t n) {
  const auto pts = testutil::spread_points(rng, n, 2, 20.0, 4.0);
  BlockVec p(BlockStructure::uniform(n, 2));
  for (std::size_t i = 0; i < n; ++i) p.block(i) = pts[i];
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  InnerParams in;
  in.rho = 0.0;
  CHECK_THROWS_AS(validate(in), InvalidArgument);
  OuterParams out;
  out.fault_tol = -1.0;
  CHECK_THROWS_AS(validate(out), InvalidArgument);
  out = {};
  out.max_scp_iters = 0;
  CHECK_THROWS_AS(validate(out), InvalidArgument);
}

TEST_CASE("zero-error linearisation converges in one iteration on the fast path") {
  testutil::Rng rng(1);
  const MeasurementStack st = dense_stack(5);
  const BlockVec p = positions(rng, 5);
  Network net(make_agents(st, 1.0));
  const BlockVec r(st.row_structure());
  for (auto& a : net.agents()) a.set_linearization(jacobian_stack(st, p), r);
  const InnerResult ir = inner_admm(net, st.col_structure(), {});
  CHECK(ir.converged);
  CHECK(ir.iterations == 1);
  CHECK(ir.rows[0].fastpath_count == 5);
  CHECK(ir.x_bar.data().isZero(0.0));
}

TEST_CASE("distributed fixed point matches the centralised solution") {
  testutil::Rng rng(2);
  const MeasurementStack st = dense_stack(6);
  for (int rep = 0; rep < 3; ++rep) {
    const BlockVec p = positions(rng, 6);
    const BlockMat R = jacobian_stack(st, p);
    BlockVec v(st.col_structure());
    v.block(testutil::uniform_int(rng, 0, 5)) = testutil::randn(rng, 2);
    const BlockVec r = R.apply(v);

    Network net(make_agents(st, 1.0));
    for (auto& a : net.agents()) a.set_linearization(R, r);
    InnerParams ip;
    ip.max_inner_iters = 20000;
    ip.tol_primal = ip.tol_dual = 1e-9;
    const InnerResult ir = inner_admm(net, st.col_structure(), ip);
    CHECK(ir.converged);
    const auto central = centralized_l21(make_linearized(R, r, BlockVec(st.col_structure())));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK((ir.x_bar.block(i) - central.v.block(i)).norm() <= 1e-5);
    }
    CHECK(support(ir.x_bar, 1e-4) == support(v, 1e-9));
  }
}

TEST_CASE("outer loop recovers a planted fault and stays quiet without one") {
  testutil::Rng rng(3);
  const MeasurementStack st = dense_stack(7);
  const BlockVec truth = positions(rng, 7);
  const BlockVec y = eval_stack(st, truth);

  const ScpResult clean = outer_scp({st, truth, y}, {}, {});
  CHECK(clean.outer_iters == 1);
  CHECK(clean.faults.empty());
  CHECK(clean.x_star.data().isZero(0.0));
  CHECK_FALSE(clean.degraded);

  BlockVec reported = truth;
  reported.block(4) += Eigen::Vector2d(0.6, -0.8);
  const ScpResult res = outer_scp({st, reported, y}, {}, {});
  CHECK(res.faults == std::vector<std::size_t>{4});
  CHECK((res.x_star.block(4) - Eigen::Vector2d(-0.6, 0.8)).norm() <= 1e-4);
  CHECK(res.trace.outer.size() == res.outer_iters);
  CHECK(res.meas_residual <= 1e-4);

  const ScpResult again = outer_scp({st, reported, y}, {}, {}, 4);
  CHECK(again.x_star.data() == res.x_star.data());
  CHECK(again.trace.inner.size() == res.trace.inner.size());
}

TEST_CASE("budget exhaustion marks the run degraded") {
  testutil::Rng rng(4);
  const MeasurementStack st = dense_stack(5);
  const BlockVec truth = positions(rng, 5);
  BlockVec reported = truth;
  reported.block(1) += Eigen::Vector2d(1.0, 0.0);
  InnerParams ip;
  ip.max_inner_iters = 3;
  OuterParams op;
  op.max_scp_iters = 2;
  const ScpResult r = outer_scp({st, reported, eval_stack(st, truth)}, ip, op);
  CHECK(r.degraded);
  CHECK(r.inner_iters <= 6);
}

TEST_CASE("mismatched inputs are rejected") {
  const MeasurementStack st = dense_stack(4);
  BlockVec p(BlockStructure::uniform(3, 2));
  BlockVec y(st.row_structure());
  CHECK_THROWS_AS(outer_scp({st, p, y}, {}, {}), InvalidArgument);
}

TEST_CASE("domain violations report the iterate") {
  MeasurementStack st(Hypergraph(2, {{MeasurementKind::Distance, {0, 1}}}), 2);
  BlockVec p(st.col_structure());
  BlockVec y(st.row_structure(), Eigen::VectorXd::Constant(1, 1.0));
  try {
    outer_scp({st, p, y}, {}, {});
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& e) {
    CHECK(std::string(e.what()).find("p_hat + x*") != std::string::npos);
  }
}

TEST_CASE("fault helpers") {
  BlockVec x(BlockStructure::uniform(3, 2));
  x.block(1) << 0.01, 0.0;
  CHECK(identify_faults(x, 1e-3) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(identify_faults(x, 0.0), InvalidArgument);
  BlockVec p(BlockStructure::uniform(4, 1));
  p.data() << 100, 3000, 5000, 1;
  CHECK(default_fault_tol(p) == doctest::Approx(1.55));
  CHECK(default_fault_tol(BlockVec(BlockStructure::uniform(2, 2))) == 1e-3);
}

TEST_CASE("trace csv columns") {
  std::vector<InnerRow> rows(2);
  rows[1].inner_iter = 2;
  std::ostringstream os;
  write_inner_trace_csv(os, rows);
  const std::string s = os.str();
  CHECK(s.rfind("outer_iter,inner_iter,max_c_norm,max_d_norm,l21_objective,meas_residual,"
                "fastpath_count\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  std::ostringstream o2;
  write_outer_trace_csv(o2, {OuterRow{}});
  CHECK(o2.str().rfind("outer_iter,inner_iters,", 0) == 0);
}

TEST_CASE("linear displacement model needs one outer iteration") {
  testutil::Rng rng(5);
  const std::size_t n = 5;
  std::vector<Hyperedge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({MeasurementKind::Displacement, {i, j}});
  MeasurementStack st(Hypergraph(n, edges), 2);
  const BlockVec truth = positions(rng, n);
  BlockVec reported = truth;
  reported.block(2) += Eigen::Vector2d(0.3, 0.4);
  InnerParams ip;
  ip.max_inner_iters = 20000;
  const ScpResult r = outer_scp({st, reported, eval_stack(st, truth)}, ip, {});
  CHECK(r.outer_iters == 1);
  CHECK(r.faults == std::vector<std::size_t>{2});
  const InnerRow& last = r.trace.inner.back();
  CHECK(last.max_c <= ip.tol_primal);
  CHECK(last.max_d <= ip.tol_primal);
}

TEST_CASE("identification worked examples") {
  BlockVec x(BlockStructure::uniform(4, 2));
  CHECK(identify_faults(x, 1e-3).empty());
  x.block(2) << 0.6, 0.8;
  x.block(0) << 1e-10, 0;
  x.block(3) << 0, -1e-9;
  const auto f = identify_faults(x, 1e-3);
  CHECK(f == std::vector<std::size_t>{2});
  CHECK(f.size() == block_sparsity(x, 1e-3));
}
