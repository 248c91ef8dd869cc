#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epool/option_pricing.hpp"
#include "epool/scenario.hpp"

namespace epool {

struct BootstrapConfig {
  double epsilon = 0.15;  ///< kernel bandwidth multiplier on the sample covariance
  std::size_t num_scenarios = 100000;
  std::uint64_t seed = 0;
};

/// Kernel bootstrap: each historical row x_t spawns floor(J / T) draws from
/// N(x_t, epsilon * Sigma_hat); the J mod T leftover draws go one each to the
/// first rows. Draws for a row are contiguous. Probabilities are uniform.
std::pair<ScenarioPanel, ProbabilityVector> kernel_bootstrap(const ScenarioPanel& history,
                                                             const BootstrapConfig& config);

/// Sample covariance with the 1/(T-1) normalization.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data);

/// Synthetic stand-in for the three-stock option desk history: log-changes of
/// three underlyings, their 1m/2m/6m ATM implied-vol changes, and 2y/10y rate
/// changes, with fat tails from a common Student-t mixing variable.
///
/// Parameters (daily units): underlying vol 2.0%, 1.8%, 1.6%; pairwise stock
/// correlation through a 0.7 market loading; vol changes 0.9%, 0.7%, 0.4% for
/// the 1m/2m/6m tenors, loaded -0.5 on the own stock return; 2y and 10y rate
/// changes 6bp and 5bp with correlation 0.8; Student-t degrees of freedom 4.
struct CaseStudyMarket {
  std::vector<std::string> names{"M", "Y", "G"};
  std::vector<double> spot{28.0, 20.0, 450.0};
  std::vector<double> atm_vol{0.30, 0.40, 0.35};
  std::vector<double> daily_vol{0.020, 0.018, 0.016};
  std::vector<std::string> tenors{"1m", "2m", "6m"};
  std::vector<double> tenor_years{1.0 / 12.0, 2.0 / 12.0, 6.0 / 12.0};
  std::vector<double> tenor_vol_change{0.009, 0.007, 0.004};
  double rate_2y_vol = 0.0006;
  double rate_10y_vol = 0.0005;
  double rate_correlation = 0.8;
  double market_loading = 0.7;
  double vol_return_loading = -0.5;
  double degrees_of_freedom = 4.0;
  double smile_alpha = -0.10;
  double smile_beta = 0.05;
  double risk_free = 0.02;
  double horizon = 1.0 / 252.0;

  /// Factor order: M, M_1m, M_2m, M_6m, Y, ..., G_6m, X2y, X10y.
  std::vector<std::string> factor_names() const;
  ScenarioPanel synthetic_history(std::size_t rows, std::uint64_t seed) const;
  /// ATM butterflies: every name at every tenor (9 contracts by default).
  std::vector<ButterflyContract> book() const;
};

}  // namespace epool
