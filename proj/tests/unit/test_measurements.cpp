#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fdirnet/errors.hpp"
#include "fdirnet/measurements.hpp"
#include "testutil.hpp"

using namespace fdirnet;

namespace {

Eigen::VectorXd v2(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST_CASE("edge values on hand-checked configurations") {
  const std::vector<Eigen::VectorXd> s = {v2(0, 0), v2(3, 4), v2(3, 0)};
  std::span<const Eigen::VectorXd> two(s.data(), 2);
  CHECK(eval_edge(MeasurementKind::Displacement, 2, two) == v2(-3, -4));
  CHECK(eval_edge(MeasurementKind::Distance, 2, two)(0) == doctest::Approx(5.0));
  CHECK((eval_edge(MeasurementKind::Bearing, 2, two) - v2(-0.6, -0.8)).norm() <= 1e-15);
  CHECK(eval_edge(MeasurementKind::TDoA, 2, s)(0) == doctest::Approx(2.0));
  CHECK(eval_edge(MeasurementKind::SubtendedAngle, 2, s)(0) ==
        doctest::Approx(std::acos(0.6)));
}

TEST_CASE("domain violations name the edge") {
  const std::vector<Eigen::VectorXd> same = {v2(1, 1), v2(1, 1)};
  CHECK_THROWS_AS(eval_edge(MeasurementKind::Distance, 2, same, 4), DomainViolation);
  try {
    edge_jacobian(MeasurementKind::Bearing, 2, same, 4);
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& e) {
    CHECK(e.edge() == 4);
  }
  const std::vector<Eigen::VectorXd> collinear = {v2(0, 0), v2(1, 0), v2(2, 0)};
  CHECK_THROWS_AS(edge_jacobian(MeasurementKind::SubtendedAngle, 2, collinear),
                  DomainViolation);
  CHECK_THROWS_AS(eval_edge(MeasurementKind::Distance, 2, std::span(collinear.data(), 1)),
                  InvalidArgument);
}

TEST_CASE("displacement finite differences are exact on a dyadic grid") {
  MeasurementStack st(Hypergraph(2, {{MeasurementKind::Displacement, {0, 1}}}), 2);
  BlockVec p(st.col_structure());
  p.data() << 0.5, -1.25, 2.0, 0.75;
  CHECK(jacobian_fd_check(st, p, 0.0625) <= 1e-12);
}

TEST_CASE("jacobian of every kind matches central differences") {
  testutil::Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    for (auto kind : {MeasurementKind::Distance, MeasurementKind::Bearing, MeasurementKind::TDoA,
                      MeasurementKind::SubtendedAngle}) {
      const std::size_t d = rep % 2 == 0 ? 2 : 3;
      const auto pts = testutil::spread_points(rng, 3, d, 10.0, 1.0);
      std::vector<std::size_t> members{0, 1, 2};
      members.resize(arity(kind));
      MeasurementStack st(Hypergraph(3, {{kind, members}}), d);
      BlockVec p(st.col_structure());
      for (std::size_t i = 0; i < 3; ++i) p.block(i) = pts[i];
      CHECK(jacobian_fd_check(st, p, 1e-6) <= 1e-5);
    }
  }
}

TEST_CASE("translation invariance and bearing projection") {
  testutil::Rng rng(8);
  const auto pts = testutil::spread_points(rng, 3, 2, 10.0, 1.0);
  for (auto kind : {MeasurementKind::Displacement, MeasurementKind::Distance,
                    MeasurementKind::Bearing, MeasurementKind::TDoA,
                    MeasurementKind::SubtendedAngle}) {
    const auto J = edge_jacobian(kind, 2, std::span(pts.data(), arity(kind)));
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(J[0].rows(), J[0].cols());
    for (const auto& b : J) sum += b;
    CHECK(sum.norm() <= 1e-12);
  }
  const auto J = edge_jacobian(MeasurementKind::Bearing, 2, std::span(pts.data(), 2));
  const Eigen::VectorXd u = eval_edge(MeasurementKind::Bearing, 2, std::span(pts.data(), 2));
  CHECK((J[1] * u).norm() <= 1e-12);
  CHECK((u.transpose() * J[1]).norm() <= 1e-12);
}

TEST_CASE("stacked evaluation and rank report") {
  // triangle of distances
  Hypergraph tri(3, {{MeasurementKind::Distance, {0, 1}},
                     {MeasurementKind::Distance, {1, 2}},
                     {MeasurementKind::Distance, {0, 2}}});
  MeasurementStack st(tri, 2);
  BlockVec p(st.col_structure());
  p.data() << 0, 0, 4, 0, 1, 3;
  const BlockVec y = eval_stack(st, p);
  CHECK(y.data()(0) == doctest::Approx(4.0));
  CHECK(y.data()(2) == doctest::Approx(std::sqrt(10.0)));
  const BlockMat J = jacobian_stack(st, p);
  CHECK(J.blocks().size() == 6);
  const RankReport r = search_space_dim(J);
  CHECK(r.rows == 3);
  CHECK(r.cols == 6);
  CHECK(r.rank == 3);
  CHECK(r.dimension == 3);
  CHECK(regular_point_check(J));

  MeasurementStack empty(Hypergraph(2, {}), 2);
  BlockVec q(empty.col_structure());
  CHECK(search_space_dim(jacobian_stack(empty, q)).rank == 0);

  CHECK_THROWS_AS(MeasurementStack(Hypergraph(3, {{MeasurementKind::TDoA, {0, 1}}}), 2),
                  InvalidArgument);
}

TEST_CASE("worked measurement examples") {
  const std::vector<Eigen::VectorXd> ang = {v2(0, 0), v2(1, 0), v2(0, 1)};
  CHECK(eval_edge(MeasurementKind::SubtendedAngle, 2, ang)(0) ==
        doctest::Approx(std::numbers::pi / 2));
  const std::vector<Eigen::VectorXd> tdoa = {v2(0, 0), v2(3, 4), v2(0, 5)};
  CHECK(std::abs(eval_edge(MeasurementKind::TDoA, 2, tdoa)(0)) <= 1e-15);

  MeasurementStack line(Hypergraph(3, {{MeasurementKind::Distance, {0, 1}},
                                       {MeasurementKind::Distance, {1, 2}}}),
                        2);
  BlockVec p(line.col_structure());
  p.data() << 0, 0, 3, 4, 6, 8;
  CHECK((eval_stack(line, p).data() - Eigen::Vector2d(5, 5)).norm() <= 1e-14);
  MeasurementStack none(Hypergraph(3, {}), 2);
  CHECK(eval_stack(none, p).size() == 0);

  const std::vector<Eigen::VectorXd> pair = {v2(0, 0), v2(3, 4)};
  const auto Jd = edge_jacobian(MeasurementKind::Distance, 2, pair);
  CHECK((Jd[0] - Eigen::RowVector2d(-0.6, -0.8)).norm() <= 1e-15);
  const auto Jx = edge_jacobian(MeasurementKind::Displacement, 2, pair);
  CHECK(Jx[0] == Eigen::MatrixXd::Identity(2, 2));
  CHECK(Jx[1] == -Eigen::MatrixXd::Identity(2, 2));
}

TEST_CASE("finite-difference error shrinks quadratically with the step") {
  MeasurementStack st(Hypergraph(3, {{MeasurementKind::SubtendedAngle, {0, 1, 2}}}), 2);
  BlockVec p(st.col_structure());
  p.data() << 0.3, -0.2, 4.1, 0.7, 1.2, 3.3;
  std::vector<double> lx, ly;
  for (double h : {1e-2, 3e-3, 1e-3, 3e-4}) {
    lx.push_back(std::log(h));
    ly.push_back(std::log(jacobian_fd_check(st, p, h)));
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("regular point checks") {
  BlockVec p(BlockStructure::uniform(3, 2));
  p.data() << 0, 0, 3, 4, 5, -1;
  MeasurementStack one(Hypergraph(2, {{MeasurementKind::Distance, {0, 1}}}), 2);
  BlockVec q(one.col_structure(), p.data().head(4));
  CHECK(regular_point_check(jacobian_stack(one, q)));
  MeasurementStack dup(Hypergraph(2, {{MeasurementKind::Distance, {0, 1}},
                                      {MeasurementKind::Distance, {0, 1}}}),
                       2);
  CHECK_FALSE(regular_point_check(jacobian_stack(dup, q)));
  MeasurementStack generic(Hypergraph(3, {{MeasurementKind::Distance, {0, 1}},
                                          {MeasurementKind::Distance, {1, 2}},
                                          {MeasurementKind::TDoA, {2, 0, 1}}}),
                           2);
  CHECK(regular_point_check(jacobian_stack(generic, p)));
  const RankReport r = search_space_dim(jacobian_stack(one, q));
  CHECK(r.rank == 1);
  CHECK(r.dimension == 3);
}
