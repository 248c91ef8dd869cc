#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "epool/scenario.hpp"
#include "epool/view_compiler.hpp"

namespace epool {

/// Minimum-relative-entropy posterior under linear constraints, found by
/// maximizing the Lagrange dual over (lambda >= 0, nu). The dual has one
/// variable per constraint row, independent of the number of scenarios.

enum class SolveStatus { Converged, Infeasible, NotConverged };
std::string_view to_string(SolveStatus status);

enum class HessianMode {
  Automatic,  ///< exact up to `exact_hessian_max_rows`, quasi-Newton above
  Exact,
  QuasiNewton,
};

struct SolverConfig {
  /// Stop when the projected dual gradient (constraint residuals of rows scaled
  /// to unit max-abs coefficient) has sup-norm below this.
  double dual_tolerance = 1e-9;
  int max_iterations = 500;
  /// Largest |sum(x) - 1| that is silently renormalized away.
  double feasibility_tolerance = 1e-8;
  double armijo_fraction = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  HessianMode hessian = HessianMode::Automatic;
  std::size_t exact_hessian_max_rows = 250;

  void validate() const;
};

struct PosteriorResult {
  ProbabilityVector posterior;
  Eigen::VectorXd lambda{};  ///< inequality multipliers, >= 0
  Eigen::VectorXd nu{};      ///< equality multipliers; nu[0] belongs to the normalization row
  double relative_entropy = 0.0;
  double max_constraint_violation = 0.0;
  double complementary_slackness = 0.0;
  double dual_value = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::NotConverged;
  /// Number of exponent clamps applied while evaluating the final primal.
  std::size_t clamped = 0;
  std::string message{};
};

/// Sum of p_tilde_j (ln p_tilde_j - ln p_j) with 0 ln 0 = 0.
/// Throws InvalidArgument when p_tilde puts mass where p has none.
double relative_entropy(const ProbabilityVector& p_tilde, const ProbabilityVector& p);
double relative_entropy(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p);

/// Exponents are clamped to [-kExponentClamp, kExponentClamp] before exponentiation.
inline constexpr double kExponentClamp = 700.0;

/// x_j = exp(ln p_j - 1 - (F' lambda)_j - (H' nu)_j). `clamped`, when given,
/// receives the number of clamped exponents.
Eigen::VectorXd primal_from_duals(const Eigen::VectorXd& lambda, const Eigen::VectorXd& nu,
                                  const LinearConstraintSet& constraints, const ProbabilityVector& prior,
                                  std::size_t* clamped = nullptr);

struct DualEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;  ///< (F x - f, H x - h)
  Eigen::VectorXd primal;
  std::size_t clamped = 0;
};

/// Lagrange dual value and its gradient at (lambda, nu).
DualEvaluation dual_value_and_gradient(const Eigen::VectorXd& lambda, const Eigen::VectorXd& nu,
                                       const LinearConstraintSet& constraints, const ProbabilityVector& prior);

PosteriorResult solve(const LinearConstraintSet& constraints, const ProbabilityVector& prior,
                      const SolverConfig& config = {});

}  // namespace epool
