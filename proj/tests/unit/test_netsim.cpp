#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "fdirnet/errors.hpp"
#include "fdirnet/measurements.hpp"
#include "fdirnet/netsim.hpp"
#include "fdirnet/solver.hpp"
#include "testutil.hpp"

using namespace fdirnet;

namespace {

Network linearised_network(testutil::Rng& rng, std::size_t n, std::size_t threads) {
  std::vector<Hyperedge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({MeasurementKind::Distance, {i, i + 1}});
  edges.push_back({MeasurementKind::Displacement, {0, n - 1}});
  MeasurementStack st(Hypergraph(n, edges), 2);
  const auto pts = testutil::spread_points(rng, n, 2, 10.0, 1.0);
  BlockVec p(st.col_structure());
  for (std::size_t i = 0; i < n; ++i) p.block(i) = pts[i];
  const BlockMat R = jacobian_stack(st, p);
  const BlockVec r(st.row_structure(), 3.0 * testutil::randn(rng, st.row_structure().total()));
  Network net(make_agents(st, 1.0), threads);
  for (auto& a : net.agents()) a.set_linearization(R, r);
  return net;
}

void iterate(Network& net, int t) {
  net.reset_round();
  net.run_phase(Phase::Sync);
  for (int k = 0; k < t; ++k) {
    net.run_phase(Phase::Primal);
    net.run_phase(Phase::Copies);
    net.run_phase(Phase::Dual);
  }
}

}  // namespace

TEST_CASE("sync phase delivers copies to every neighbour") {
  testutil::Rng rng(1);
  Network net = linearised_network(rng, 4, 0);
  net.reset_round();
  const PhaseOutcome o = net.run_phase(Phase::Sync);
  CHECK(o.delivered.size() == 8);
  for (const auto& a : net.agents()) {
    for (const auto& nb : a.neighbors()) CHECK(nb.copy_of_me.round == 0);
  }
  CHECK(net.round() == 0);
  net.run_phase(Phase::Primal);
  CHECK(net.round() == 1);
}

TEST_CASE("threaded runs are bit-identical to single-threaded runs") {
  testutil::Rng r1(2), r2(2);
  Network a = linearised_network(r1, 7, 0);
  Network b = linearised_network(r2, 7, 4);
  iterate(a, 30);
  iterate(b, 30);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(a.agents()[i].x_bar == b.agents()[i].x_bar);
    for (std::size_t k = 0; k < a.agents()[i].edges().size(); ++k) {
      CHECK(a.agents()[i].edges()[k].lambda == b.agents()[i].edges()[k].lambda);
    }
  }
}

TEST_CASE("dropped messages surface as protocol violations") {
  testutil::Rng rng(3);
  Network net = linearised_network(rng, 4, 0);
  net.drop_filter = [](const Message& m) { return m.kind == PayloadKind::XBar && m.sender == 2; };
  net.reset_round();
  net.run_phase(Phase::Sync);
  net.run_phase(Phase::Primal);
  CHECK_THROWS_AS(net.run_phase(Phase::Copies), ProtocolViolation);
}

TEST_CASE("message log, statistics and csv") {
  testutil::Rng rng(4);
  Network net = linearised_network(rng, 5, 0);
  net.set_logging(true);
  iterate(net, 2);
  const auto stats = message_stats(net.log());
  // agent 2 has neighbours 1 and 3: x̄ + μ̃ + copy to each, 2-float payloads
  const AgentTraffic t = stats.at({1, 2});
  CHECK(t.messages == 6);
  CHECK(t.floats == 12);
  CHECK(t.bytes() == 96);
  std::ostringstream os;
  write_message_csv(os, net.log());
  CHECK(os.str().rfind("round,phase,sender,receiver,kind,payload_norm\n", 0) == 0);
  net.clear_log();
  CHECK(net.log().empty());
}

TEST_CASE("network construction checks") {
  std::vector<AgentState> bad;
  bad.emplace_back(0, 1, 1.0, std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}},
                   std::vector<EdgeSpec>{});
  bad.emplace_back(1, 1, 1.0, std::vector<std::pair<std::size_t, std::size_t>>{},
                   std::vector<EdgeSpec>{});
  CHECK_THROWS_AS(Network(bad, 0), InvalidArgument);
  std::vector<AgentState> shuffled;
  shuffled.emplace_back(1, 1, 1.0, std::vector<std::pair<std::size_t, std::size_t>>{},
                        std::vector<EdgeSpec>{});
  CHECK_THROWS_AS(Network(shuffled, 0), InvalidArgument);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  try {
    parallel_for(10, 3, [](std::size_t k) {
      if (k == 4 || k == 7) throw std::runtime_error(std::to_string(k));
    });
    FAIL("expected exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "4");
  }
}

TEST_CASE("message counts per phase") {
  MeasurementStack st(Hypergraph(3, {{MeasurementKind::Distance, {0, 1}}}), 2);
  Network net(make_agents(st, 1.0));
  const BlockVec r(st.row_structure(), Eigen::VectorXd::Constant(1, 3.0));
  BlockVec p(st.col_structure());
  p.data() << 0, 0, 3, 4, 9, 9;
  for (auto& a : net.agents()) a.set_linearization(jacobian_stack(st, p), r);
  net.reset_round();
  net.run_phase(Phase::Sync);
  const PhaseOutcome o = net.run_phase(Phase::Primal);
  std::size_t xbar = 0, mu = 0;
  for (const auto& m : o.delivered) {
    xbar += m.kind == PayloadKind::XBar;
    mu += m.kind == PayloadKind::DualMu;
    CHECK(m.sender != 2);
  }
  CHECK(xbar == 2);
  CHECK(mu == 2);
  CHECK(o.fast_path.size() == 3);
  CHECK(o.fast_path[2] == 1);  // isolated agent still passes the barrier
  CHECK(net.run_phase(Phase::Copies).delivered.size() == 2);
  CHECK(net.run_phase(Phase::Dual).delivered.empty());
}

TEST_CASE("payload size follows block dimension") {
  auto floats = [](std::size_t d) {
    MeasurementStack st(Hypergraph(2, {{MeasurementKind::Distance, {0, 1}}}), d);
    Network net(make_agents(st, 1.0));
    BlockVec p(st.col_structure());
    p.data()(0) = 1.0;
    for (auto& a : net.agents()) a.set_linearization(jacobian_stack(st, p), BlockVec(st.row_structure()));
    net.set_logging(true);
    net.reset_round();
    net.run_phase(Phase::Sync);
    net.run_phase(Phase::Primal);
    return message_stats(net.log()).at({1, 0}).floats;
  };
  CHECK(floats(4) == 2 * floats(2));
}
