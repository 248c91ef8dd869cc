#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace epool {

/// min 1/2 x'Qx + c'x  s.t.  A_eq x = b_eq,  A_in x <= b_in, with Q positive definite.
struct QuadraticProgram {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;

  Eigen::Index dimension() const noexcept { return Q.rows(); }
  void validate() const;
  /// Largest violation of any equality or inequality row at x.
  double max_violation(const Eigen::VectorXd& x) const;
};

struct QpOptions {
  std::size_t max_iterations = 2000;
  double tolerance = 1e-12;
};

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd inequality_multipliers;
  std::vector<Eigen::Index> active_set;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Primal active-set method started from the feasible point x0.
QpResult solve_qp(const QuadraticProgram& qp, const Eigen::VectorXd& x0, const QpOptions& options = {});

}  // namespace epool
