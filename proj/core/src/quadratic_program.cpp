#include "epool/quadratic_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epool/error.hpp"

namespace epool {

void QuadraticProgram::validate() const {
  const Eigen::Index n = Q.rows();
  EPOOL_REQUIRE(n > 0 && Q.cols() == n, InvalidArgument, "QP Hessian must be square and non-empty");
  EPOOL_REQUIRE(c.size() == n, InvalidArgument, "QP linear term has the wrong size");
  EPOOL_REQUIRE(A_eq.rows() == b_eq.size() && (A_eq.rows() == 0 || A_eq.cols() == n), InvalidArgument,
                "QP equality block has inconsistent shape");
  EPOOL_REQUIRE(A_in.rows() == b_in.size() && (A_in.rows() == 0 || A_in.cols() == n), InvalidArgument,
                "QP inequality block has inconsistent shape");
}

double QuadraticProgram::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  if (A_eq.rows() > 0) worst = std::max(worst, (A_eq * x - b_eq).cwiseAbs().maxCoeff());
  if (A_in.rows() > 0) worst = std::max(worst, (A_in * x - b_in).maxCoeff());
  return worst;
}

namespace {

// Solves [Q A'; A 0][p; y] = [-g; 0]. A may be rank deficient, so the KKT
// matrix is factored with complete orthogonal decomposition.
void solve_kkt(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& A, const Eigen::VectorXd& g, Eigen::VectorXd& p,
               Eigen::VectorXd& y) {
  const Eigen::Index n = Q.rows();
  const Eigen::Index m = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = Q;
  if (m > 0) {
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.head(n) = -g;
  const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
  p = sol.head(n);
  y = sol.tail(m);
}

}  // namespace

QpResult solve_qp(const QuadraticProgram& qp, const Eigen::VectorXd& x0, const QpOptions& options) {
  qp.validate();
  const Eigen::Index n = qp.dimension();
  EPOOL_REQUIRE(x0.size() == n, InvalidArgument, "QP starting point has the wrong size");
  const double scale = std::max(1.0, x0.cwiseAbs().maxCoeff());
  EPOOL_REQUIRE(qp.max_violation(x0) <= 1e-9 * scale, InvalidArgument, "QP starting point is infeasible");

  const Eigen::Index n_eq = qp.A_eq.rows();
  const Eigen::Index n_in = qp.A_in.rows();
  QpResult result;
  result.x = x0;
  result.inequality_multipliers = Eigen::VectorXd::Zero(n_in);
  std::vector<bool> in_working(static_cast<std::size_t>(n_in), false);
  std::vector<Eigen::Index> working;

  const double step_tol = options.tolerance * std::max(1.0, qp.Q.cwiseAbs().maxCoeff());
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    const Eigen::Index m = n_eq + static_cast<Eigen::Index>(working.size());
    Eigen::MatrixXd A(m, n);
    if (n_eq > 0) A.topRows(n_eq) = qp.A_eq;
    for (std::size_t k = 0; k < working.size(); ++k) A.row(n_eq + static_cast<Eigen::Index>(k)) = qp.A_in.row(working[k]);

    const Eigen::VectorXd g = qp.Q * result.x + qp.c;
    Eigen::VectorXd p;
    Eigen::VectorXd y;
    solve_kkt(qp.Q, A, g, p, y);

    if (p.cwiseAbs().maxCoeff() <= step_tol * std::max(1.0, result.x.cwiseAbs().maxCoeff())) {
      // Stationary on the working set: drop the most negative inequality multiplier.
      Eigen::Index drop = -1;
      double most_negative = -1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < working.size(); ++k) {
        const double mu = y[n_eq + static_cast<Eigen::Index>(k)];
        if (mu < most_negative) {
          most_negative = mu;
          drop = static_cast<Eigen::Index>(k);
        }
      }
      if (drop < 0) {
        result.converged = true;
        for (std::size_t k = 0; k < working.size(); ++k)
          result.inequality_multipliers[working[k]] = std::max(0.0, y[n_eq + static_cast<Eigen::Index>(k)]);
        break;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = false;
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < n_in; ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double ap = qp.A_in.row(i).dot(p);
      if (ap <= 1e-14 * p.cwiseAbs().maxCoeff()) continue;
      const double slack = std::max(0.0, qp.b_in[i] - qp.A_in.row(i).dot(result.x));
      const double limit = slack / ap;
      if (limit < alpha) {
        alpha = limit;
        blocking = i;
      }
    }
    result.x += alpha * p;
    if (blocking >= 0) {
      in_working[static_cast<std::size_t>(blocking)] = true;
      working.push_back(blocking);
    }
  }
  result.active_set = working;
  std::sort(result.active_set.begin(), result.active_set.end());
  return result;
}

}  // namespace epool
