#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epool/option_pricing.hpp"
#include "epool/scenario.hpp"

namespace epool {

/// J x I panel of p&l (or prices) per instrument. Computed once and never
/// touched by posterior updates.
struct PricePanel {
  Eigen::MatrixXd data;
  std::vector<std::string> instrument_ids;
  /// Scenarios where some contract had a non-positive smile vol; priced at
  /// intrinsic value.
  std::vector<std::size_t> flagged_scenarios;

  std::size_t num_scenarios() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t num_instruments() const noexcept { return static_cast<std::size_t>(data.cols()); }
};

/// Entry (j, i) = horizon price of contract i under scenario j minus current_prices[i].
PricePanel build_pnl_panel(const ScenarioPanel& panel, const std::vector<ButterflyContract>& book,
                           const std::vector<double>& current_prices);
/// Same, using current_price(contract) as the reference price.
PricePanel build_pnl_panel(const ScenarioPanel& panel, const std::vector<ButterflyContract>& book);

/// Rows b_lower <= B w <= b_upper. Use +-infinity for one-sided rows.
struct LinearConstraints {
  Eigen::MatrixXd B;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> labels;

  void add(const Eigen::RowVectorXd& row, double lo, double hi, std::string label);
  Eigen::Index rows() const noexcept { return B.rows(); }
};

/// Zero-budget row (sum w_i P_i,t = 0) and one zero-delta row per underlying.
LinearConstraints zero_budget_zero_delta(const std::vector<ButterflyContract>& book,
                                         const std::vector<double>& current_prices);

struct FrontierSpec {
  double gamma = 0.95;
  std::vector<double> lambdas;
  Eigen::VectorXd position_bounds;
  LinearConstraints constraints;
  std::size_t num_variance_targets = 30;

  void validate(std::size_t num_instruments) const;
};

struct FrontierCandidate {
  Eigen::VectorXd weights;
  double expected_pnl = 0.0;
  double variance = 0.0;
  double cvar = 0.0;
};

struct FrontierPoint {
  double lambda = 0.0;
  Eigen::VectorXd weights;
  double expected_pnl = 0.0;
  double cvar = 0.0;
  double variance = 0.0;
  std::size_t candidate_index = 0;
};

/// Step 1: probability-weighted mean-variance frontier, the minimum-variance
/// point followed by log-spaced variance targets up to the maximum-return
/// portfolio. Candidates are ordered by increasing variance.
std::vector<FrontierCandidate> mean_variance_candidates(const PricePanel& pnl, const ProbabilityVector& p,
                                                        const FrontierSpec& spec);

/// Step 2: for each lambda, the candidate maximizing E - lambda CVaR_gamma.
std::vector<FrontierPoint> mean_cvar_frontier(const PricePanel& pnl, const ProbabilityVector& p,
                                              const FrontierSpec& spec);

/// Same as above on a precomputed candidate set.
std::vector<FrontierPoint> select_frontier(const std::vector<FrontierCandidate>& candidates,
                                           const std::vector<double>& lambdas);

/// CSV with header lambda,<instrument ids...>,expected_pnl,cvar.
std::string format_frontier_csv(const std::vector<FrontierPoint>& frontier,
                                const std::vector<std::string>& instrument_ids);
void write_frontier_csv(const std::vector<FrontierPoint>& frontier, const std::vector<std::string>& instrument_ids,
                        const std::filesystem::path& path);

}  // namespace epool
