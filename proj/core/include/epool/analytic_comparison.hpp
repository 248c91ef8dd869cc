#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "epool/analytic_normal.hpp"
#include "epool/entropy_solver.hpp"
#include "epool/view_compiler.hpp"

namespace epool {

/// Scenario constraints equivalent to normal views: E[Q X] = mu_q, and for the
/// covariance block E[(G X)(G X)'] = sigma_g + m m' with m = G mu_tilde, the
/// analytical posterior mean of G X. The mean of G X is pinned as well where it
/// is not already implied by the Q rows.
LinearConstraintSet normal_view_constraints(const ScenarioPanel& panel, const NormalViewSpec& views,
                                            const Eigen::VectorXd& posterior_mean);

struct AnalyticalComparison {
  NormalModel analytical;
  Eigen::VectorXd numerical_mean;
  Eigen::MatrixXd numerical_covariance;
  PosteriorResult solve;
  double max_mean_gap = 0.0;          ///< max |mu_num - mu_tilde|
  double max_relative_std_gap = 0.0;  ///< max |sd_num / sd_tilde - 1|
};

/// Discretizes the reference into J equally weighted draws, solves the entropy
/// program for the views, and compares posterior-weighted moments with the closed form.
AnalyticalComparison compare_analytical(const NormalModel& reference, const NormalViewSpec& views,
                                        std::size_t num_scenarios, std::uint64_t seed,
                                        const SolverConfig& config = {},
                                        Discretization scheme = Discretization::Stratified);

}  // namespace epool
