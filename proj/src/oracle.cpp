#include "fdirnet/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "fdirnet/errors.hpp"

namespace fdirnet {

void LinearizedProblem::validate() const {
  if (!(b_lin.structure() == R.row_structure())) {
    throw InvalidArgument("LinearizedProblem: b_lin does not match the row structure of R");
  }
}

LinearizedProblem make_linearized(const BlockMat& R, const BlockVec& residual,
                                  const BlockVec& x_star) {
  LinearizedProblem p;
  p.R = R;
  p.b_lin = BlockVec(R.row_structure(), residual.data() + R.apply(x_star).data());
  return p;
}

AffineProjector::AffineProjector(const Eigen::MatrixXd& R, const Eigen::VectorXd& b) : R_(R) {
  if (R.rows() != b.size()) throw InvalidArgument("AffineProjector: shape mismatch");
  if (R.rows() == 0) {
    pinv_ = Eigen::MatrixXd::Zero(R.cols(), 0);
    v0_ = Eigen::VectorXd::Zero(R.cols());
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = s.size() > 0 ? 1e-12 * std::max(1.0, s(0)) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cut) inv(k) = 1.0 / s(k);
  }
  const Eigen::Index r = s.size();
  pinv_ = svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).transpose();
  v0_ = pinv_ * b;
  const double res = (R * v0_ - b).norm();
  if (res > 1e-8) {
    throw Infeasible("AffineProjector: R v = b has least-squares residual " + std::to_string(res));
  }
}

Eigen::VectorXd AffineProjector::project(const Eigen::VectorXd& x) const {
  return x - pinv_ * (R_ * x) + v0_;
}

L21Solution centralized_l21(const LinearizedProblem& p, double tol) {
  p.validate();
  if (!(tol > 0.0)) throw InvalidArgument("centralized_l21: tol must be positive");
  const BlockStructure& cols = p.R.col_structure();
  const AffineProjector proj(p.R.to_dense(), p.b_lin.data());

  const Eigen::Index n = static_cast<Eigen::Index>(cols.total());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  const double kappa = 1.0 / kOracleRho;

  for (std::size_t it = 1; it <= kOracleMaxIters; ++it) {
    v = proj.project(z - u);
    const Eigen::VectorXd z_prev = z;
    const Eigen::VectorXd s = v + u;
    for (std::size_t i = 0; i < cols.num_blocks(); ++i) {
      const auto off = static_cast<Eigen::Index>(cols.offset(i));
      const auto len = static_cast<Eigen::Index>(cols.length(i));
      const double nrm = s.segment(off, len).norm();
      const double scale = nrm > kappa ? 1.0 - kappa / nrm : 0.0;
      z.segment(off, len) = scale * s.segment(off, len);
    }
    u += v - z;
    if ((v - z).norm() <= tol && kOracleRho * (z - z_prev).norm() <= tol) {
      return {BlockVec(cols, v), BlockVec(cols, z), it};
    }
  }
  throw ConvergenceFailure("centralized_l21: no convergence within iteration cap", v,
                           (v - z).norm());
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

// Advances `idx` to the next k-combination of [0, n) in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (idx[pos] < n - k + pos) {
      ++idx[pos];
      for (std::size_t q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SupportResult brute_force_support(const LinearizedProblem& p, std::size_t max_support) {
  p.validate();
  const BlockStructure& cols = p.R.col_structure();
  const std::size_t k = cols.num_blocks();
  max_support = std::min(max_support, k);
  double total = 0.0;
  for (std::size_t c = 0; c <= max_support; ++c) total += binomial(k, c);
  if (total > static_cast<double>(kBruteForceGuard)) {
    throw InvalidArgument("brute_force_support: " + std::to_string(static_cast<long long>(total)) +
                          " subsets exceed the enumeration guard");
  }

  const Eigen::MatrixXd R = p.R.to_dense();
  const Eigen::VectorXd& b = p.b_lin.data();
  SupportResult out;
  out.v = BlockVec(cols);
  double best_norm = std::numeric_limits<double>::infinity();

  for (std::size_t c = 0; c <= max_support; ++c) {
    std::vector<std::size_t> idx(c);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
      ++out.subsets_inspected;
      std::size_t width = 0;
      for (std::size_t i : idx) width += cols.length(i);
      Eigen::MatrixXd sub(R.rows(), static_cast<Eigen::Index>(width));
      Eigen::Index at = 0;
      for (std::size_t i : idx) {
        const auto len = static_cast<Eigen::Index>(cols.length(i));
        sub.middleCols(at, len) = R.middleCols(static_cast<Eigen::Index>(cols.offset(i)), len);
        at += len;
      }
      Eigen::VectorXd x = Eigen::VectorXd::Zero(sub.cols());
      if (sub.cols() > 0) x = sub.completeOrthogonalDecomposition().solve(b);
      const double res = (sub * x - b).norm();
      if (res <= kBruteForceResidual) {
        ++out.minimal_supports;
        if (x.norm() < best_norm) {
          best_norm = x.norm();
          out.found = true;
          out.support = idx;
          out.v = BlockVec(cols);
          at = 0;
          for (std::size_t i : idx) {
            const auto len = static_cast<Eigen::Index>(cols.length(i));
            out.v.block(i) = x.segment(at, len);
            at += len;
          }
        }
      }
    } while (c > 0 && next_combination(idx, k));
    if (out.found) break;
  }
  return out;
}

}  // namespace fdirnet
