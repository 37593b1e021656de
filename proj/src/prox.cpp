#include "fdirnet/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fdirnet/errors.hpp"
#include "fdirnet/kernels.hpp"

namespace fdirnet {

void validate(const ProxProblem& p) {
  if (p.A.rows() < 1 || p.A.cols() < 1) {
    throw InvalidArgument("ProxProblem: A must have at least one row and one column");
  }
  if (p.b.size() != p.A.rows()) {
    throw InvalidArgument("ProxProblem: b has " + std::to_string(p.b.size()) +
                          " entries, A has " + std::to_string(p.A.rows()) + " rows");
  }
  if (!p.A.allFinite() || !p.b.allFinite()) {
    throw InvalidArgument("ProxProblem: non-finite entries");
  }
}

namespace {

Eigen::VectorXd at_b(const ProxProblem& p) {
  Eigen::VectorXd g;
  kernels::gemv_t(p.A, p.b, g);
  return g;
}

}  // namespace

bool zero_test(const ProxProblem& p) {
  validate(p);
  return kernels::norm(at_b(p)) <= 1.0;
}

double stationarity_residual(const ProxProblem& p, const Eigen::VectorXd& v) {
  validate(p);
  if (v.size() != p.A.cols()) throw InvalidArgument("stationarity_residual: size mismatch");
  const double nv = v.norm();
  if (nv == 0.0) {
    throw InvalidArgument("stationarity_residual: undefined at v = 0");
  }
  Eigen::VectorXd av;
  kernels::gemv(p.A, v, av);
  Eigen::VectorXd grad;
  kernels::gemv_t(p.A, av - p.b, grad);
  grad += v / nv;
  return kernels::norm(grad);
}

double objective(const ProxProblem& p, const Eigen::VectorXd& v) {
  validate(p);
  if (v.size() != p.A.cols()) throw InvalidArgument("objective: size mismatch");
  Eigen::VectorXd av;
  kernels::gemv(p.A, v, av);
  return v.norm() + 0.5 * (av - p.b).squaredNorm();
}

double lambda_max(const Eigen::MatrixXd& gram) {
  const auto n = gram.rows();
  if (n == 0) return 0.0;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 2.0 * static_cast<double>(i));
  v.normalize();
  Eigen::VectorXd w;
  double lam = 0.0;
  for (int it = 0; it < 10000; ++it) {
    kernels::gemv(gram, v, w);
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
    if (std::abs(next - lam) <= 1e-10 * std::abs(next)) {
      lam = next;
      break;
    }
    lam = next;
  }
  // The Rayleigh quotient is a lower bound; the largest diagonal entry is too.
  return std::max(lam, gram.diagonal().maxCoeff());
}

ProxSolution solve_prox(const ProxProblem& p, const ProxOptions& options) {
  validate(p);
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_prox: tol must be positive");
  const Eigen::VectorXd g = at_b(p);
  const double gnorm = kernels::norm(g);

  ProxSolution sol;
  if (gnorm <= 1.0) {
    sol.v_star = Eigen::VectorXd::Zero(p.A.cols());
    sol.kase = ProxCase::Zero;
    return sol;
  }
  sol.kase = ProxCase::Interior;

  const Eigen::MatrixXd gram = p.A.transpose() * p.A;
  const double lam = lambda_max(gram);
  const double r_floor = (gnorm - 1.0) / (2.0 * lam);
  const double step = 1.0 / (lam + 1.0 / r_floor);
  const double half_bb = 0.5 * p.b.squaredNorm();

  auto keep_off_origin = [r_floor](Eigen::VectorXd& v, const Eigen::VectorXd& fallback) {
    const double nv = v.norm();
    if (nv == 0.0) {
      v = fallback;
    } else if (nv < r_floor) {
      v *= r_floor / nv;
    }
  };

  // Objective and stationarity residual from a precomputed G v.
  auto measure = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& gv, double& f) {
    const double nv = v.norm();
    f = nv + 0.5 * kernels::dot(kernels::view(v), kernels::view(gv)) -
        kernels::dot(kernels::view(g), kernels::view(v)) + half_bb;
    return ((gv - g) + v / nv).norm();
  };

  Eigen::VectorXd seed = (1.0 - 1.0 / gnorm) * g / lam;
  Eigen::VectorXd x = options.initial.size() == p.A.cols() ? options.initial : seed;
  keep_off_origin(x, seed);

  Eigen::VectorXd gx;
  kernels::gemv(gram, x, gx);
  double fx = 0.0;
  double res = measure(x, gx, fx);

  Eigen::VectorXd best = x;
  double best_f = fx;
  double best_res = res;
  if (options.record_history) sol.residual_history.push_back(res);

  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd y;
  Eigen::VectorXd gy;
  Eigen::VectorXd x_new;
  Eigen::VectorXd g_new;
  double t = 1.0;
  const bool accelerate = options.method == DescentMethod::Nesterov;

  std::size_t k = 0;
  while (res > options.tol) {
    if (k == options.max_iters) {
      throw ConvergenceFailure("solve_prox: no convergence after " + std::to_string(k) +
                                   " iterations (residual " + std::to_string(best_res) + ")",
                               best, best_res);
    }
    ++k;
    double t_next = t;
    if (accelerate) {
      t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x + ((t - 1.0) / t_next) * (x - x_prev);
      keep_off_origin(y, x);
      kernels::gemv(gram, y, gy);
    } else {
      y = x;
      gy = gx;
    }
    x_new = y - step * ((gy - g) + y / y.norm());
    keep_off_origin(x_new, y);
    kernels::gemv(gram, x_new, g_new);
    double f_new = 0.0;
    double r_new = measure(x_new, g_new, f_new);

    if (accelerate && f_new > fx) {
      // Momentum overshot: restart from a plain gradient step at x.
      t_next = 1.0;
      x_new = x - step * ((gx - g) + x / x.norm());
      keep_off_origin(x_new, x);
      kernels::gemv(gram, x_new, g_new);
      r_new = measure(x_new, g_new, f_new);
    }

    x_prev = std::move(x);
    x = x_new;
    gx = g_new;
    fx = f_new;
    res = r_new;
    t = t_next;
    if (options.record_history) sol.residual_history.push_back(res);
    if (fx < best_f || res <= options.tol) {
      best = x;
      best_f = fx;
      best_res = res;
    }
  }

  sol.v_star = x;
  sol.stationarity_residual = res;
  sol.iterations = k;
  return sol;
}

}  // namespace fdirnet
