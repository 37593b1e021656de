#include <doctest.h>

#include "fdirnet/errors.hpp"
#include "fdirnet/oracle.hpp"
#include "testutil.hpp"

using namespace fdirnet;

namespace {

LinearizedProblem dense_problem(const Eigen::MatrixXd& R, const Eigen::VectorXd& b,
                                const BlockStructure& cols) {
  LinearizedProblem p;
  p.R = BlockMat(BlockStructure({static_cast<std::size_t>(R.rows())}), cols);
  p.R.set(0, 0, R.leftCols(static_cast<Eigen::Index>(cols.length(0))));
  for (std::size_t i = 0; i < cols.num_blocks(); ++i) {
    p.R.set(0, i, R.middleCols(static_cast<Eigen::Index>(cols.offset(i)),
                               static_cast<Eigen::Index>(cols.length(i))));
  }
  p.b_lin = BlockVec(p.R.row_structure(), b);
  return p;
}

}  // namespace

TEST_CASE("full observation returns the right-hand side") {
  const BlockStructure cols = BlockStructure::uniform(3, 2);
  Eigen::VectorXd b(6);
  b << 1, 2, -3, 0.5, 0, 4;
  const auto sol = centralized_l21(dense_problem(Eigen::MatrixXd::Identity(6, 6), b, cols));
  CHECK((sol.v.data() - b).norm() <= 1e-8);
}

TEST_CASE("zero right-hand side gives zero") {
  testutil::Rng rng(1);
  const BlockStructure cols = BlockStructure::uniform(4, 2);
  const auto sol =
      centralized_l21(dense_problem(testutil::randn(rng, 5, 8), Eigen::VectorXd::Zero(5), cols));
  CHECK(sol.v.data().norm() <= 1e-12);
  CHECK(sol.z.data().norm() == 0.0);
}

TEST_CASE("underdetermined systems recover a planted one-block solution") {
  testutil::Rng rng(2);
  const BlockStructure cols = BlockStructure::uniform(8, 2);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd R = testutil::randn(rng, 10, 16);
    BlockVec v(cols);
    v.block(testutil::uniform_int(rng, 0, 7)) = testutil::randn(rng, 2);
    const auto p = dense_problem(R, R * v.data(), cols);
    const auto sol = centralized_l21(p);
    CHECK((sol.v.data() - v.data()).norm() <= 1e-6);
    CHECK((R * sol.v.data() - p.b_lin.data()).norm() <= 1e-10);
    const auto bf = brute_force_support(p, 2);
    REQUIRE(bf.found);
    CHECK(bf.support == support(v, 1e-9));
    CHECK(bf.minimal_supports == 1);
  }
}

TEST_CASE("infeasible systems are rejected") {
  Eigen::MatrixXd R(2, 2);
  R << 1, 1, 1, 1;
  const auto p = dense_problem(R, Eigen::Vector2d(1, 2), BlockStructure({1, 1}));
  CHECK_THROWS_AS(centralized_l21(p), Infeasible);
  CHECK_THROWS_AS(AffineProjector(R, Eigen::Vector2d(1, 2)), Infeasible);
}

TEST_CASE("brute force enumeration counts") {
  testutil::Rng rng(3);
  const BlockStructure cols = BlockStructure::uniform(6, 1);
  // 6 generic equations in 6 unknowns: no support of size <= 2 fits a dense b
  const Eigen::MatrixXd R = testutil::randn(rng, 6, 6);
  const auto none = brute_force_support(dense_problem(R, testutil::randn(rng, 6), cols), 2);
  CHECK_FALSE(none.found);
  CHECK(none.subsets_inspected == 22);
  const auto zero = brute_force_support(dense_problem(R, Eigen::VectorXd::Zero(6), cols), 2);
  CHECK(zero.found);
  CHECK(zero.support.empty());
  CHECK(zero.subsets_inspected == 1);
  const auto big = dense_problem(testutil::randn(rng, 3, 40), Eigen::VectorXd::Zero(3),
                                 BlockStructure::uniform(40, 1));
  CHECK_THROWS_AS(brute_force_support(big, 5), InvalidArgument);
}

TEST_CASE("linearised problem from a residual") {
  BlockMat R(BlockStructure({1}), BlockStructure({1, 1}));
  R.set(0, 0, Eigen::MatrixXd::Constant(1, 1, 2.0));
  R.set(0, 1, Eigen::MatrixXd::Constant(1, 1, -1.0));
  const BlockVec r(BlockStructure({1}), Eigen::VectorXd::Constant(1, 0.5));
  const BlockVec x(BlockStructure({1, 1}), Eigen::Vector2d(1.0, 1.0));
  CHECK(make_linearized(R, r, x).b_lin.data()(0) == doctest::Approx(1.5));
}
