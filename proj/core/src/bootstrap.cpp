#include "epool/bootstrap.hpp"

#include <cmath>
#include <random>

#include "epool/error.hpp"

namespace epool {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
  EPOOL_REQUIRE(data.rows() >= 2, InvalidArgument, "sample covariance needs at least two rows");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows() - 1);
}

std::pair<ScenarioPanel, ProbabilityVector> kernel_bootstrap(const ScenarioPanel& history,
                                                             const BootstrapConfig& config) {
  const auto T = static_cast<Eigen::Index>(history.num_scenarios());
  const auto N = static_cast<Eigen::Index>(history.num_factors());
  EPOOL_REQUIRE(config.epsilon > 0.0, InvalidArgument, "kernel bandwidth must be positive");
  EPOOL_REQUIRE(T >= N + 1, DegenerateData, "history needs more rows than factors to estimate a covariance");
  EPOOL_REQUIRE(config.num_scenarios >= static_cast<std::size_t>(T), InvalidArgument,
                "bootstrap size must be at least the history length");

  Eigen::MatrixXd cov = config.epsilon * sample_covariance(history.data());
  // Symmetric square root tolerates a semidefinite covariance; a 1e-12 ridge
  // keeps Cholesky-like behaviour when the spectrum touches zero.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  EPOOL_REQUIRE(eig.info() == Eigen::Success, DegenerateData, "covariance eigendecomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.minCoeff() <= 0.0) values = values.cwiseMax(0.0).array() + 1e-12;
  const Eigen::MatrixXd root = eig.eigenvectors() * values.cwiseSqrt().asDiagonal();

  const std::size_t per_row = config.num_scenarios / static_cast<std::size_t>(T);
  const std::size_t extra = config.num_scenarios % static_cast<std::size_t>(T);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd data(static_cast<Eigen::Index>(config.num_scenarios), N);
  Eigen::VectorXd z(N);
  Eigen::Index out = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const std::size_t draws = per_row + (static_cast<std::size_t>(t) < extra ? 1 : 0);
    for (std::size_t d = 0; d < draws; ++d, ++out) {
      for (Eigen::Index i = 0; i < N; ++i) z[i] = normal(rng);
      data.row(out) = history.data().row(t) + (root * z).transpose();
    }
  }
  return {ScenarioPanel(history.factor_names(), std::move(data)), ProbabilityVector::uniform(config.num_scenarios)};
}

std::vector<std::string> CaseStudyMarket::factor_names() const {
  std::vector<std::string> out;
  for (const auto& name : names) {
    out.push_back(name);
    for (const auto& tenor : tenors) out.push_back(name + "_" + tenor);
  }
  out.emplace_back("X2y");
  out.emplace_back("X10y");
  return out;
}

ScenarioPanel CaseStudyMarket::synthetic_history(std::size_t rows, std::uint64_t seed) const {
  const std::size_t S = names.size();
  const std::size_t V = tenors.size();
  EPOOL_REQUIRE(spot.size() == S && atm_vol.size() == S && daily_vol.size() == S, InvalidArgument,
                "per-name parameter lists must match the number of names");
  EPOOL_REQUIRE(tenor_years.size() == V && tenor_vol_change.size() == V, InvalidArgument,
                "per-tenor parameter lists must match the number of tenors");
  EPOOL_REQUIRE(degrees_of_freedom > 2.0, InvalidArgument, "Student-t degrees of freedom must exceed 2");
  const auto N = static_cast<Eigen::Index>(S * (V + 1) + 2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(degrees_of_freedom);
  const double idio = std::sqrt(1.0 - market_loading * market_loading);
  const double vol_idio = std::sqrt(1.0 - vol_return_loading * vol_return_loading);
  const double rate_idio = std::sqrt(1.0 - rate_correlation * rate_correlation);
  const double t_scale = std::sqrt((degrees_of_freedom - 2.0) / degrees_of_freedom);

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), N);
  for (std::size_t r = 0; r < rows; ++r) {
    // Common mixing variable: unit-variance multivariate t.
    const double mix = t_scale * std::sqrt(degrees_of_freedom / chi2(rng));
    const double market = normal(rng);
    Eigen::Index col = 0;
    for (std::size_t s = 0; s < S; ++s) {
      const double ret = market_loading * market + idio * normal(rng);
      data(static_cast<Eigen::Index>(r), col++) = mix * daily_vol[s] * ret;
      const double level = vol_return_loading * ret + vol_idio * normal(rng);
      for (std::size_t v = 0; v < V; ++v) {
        const double shock = 0.95 * level + std::sqrt(1.0 - 0.95 * 0.95) * normal(rng);
        data(static_cast<Eigen::Index>(r), col++) = mix * tenor_vol_change[v] * shock;
      }
    }
    const double a = normal(rng);
    const double b = normal(rng);
    data(static_cast<Eigen::Index>(r), col++) = mix * rate_2y_vol * a;
    data(static_cast<Eigen::Index>(r), col++) = mix * rate_10y_vol * (rate_correlation * a + rate_idio * b);
  }
  return ScenarioPanel(factor_names(), std::move(data));
}

std::vector<ButterflyContract> CaseStudyMarket::book() const {
  std::vector<ButterflyContract> out;
  for (std::size_t s = 0; s < names.size(); ++s) {
    for (std::size_t v = 0; v < tenors.size(); ++v) {
      ButterflyContract c;
      c.id = names[s] + "_" + tenors[v];
      c.underlying_id = names[s];
      c.underlying_factor = names[s];
      c.vol_factor = names[s] + "_" + tenors[v];
      c.strike = spot[s];
      c.expiry = tenor_years[v];
      c.risk_free = risk_free;
      c.smile_alpha = smile_alpha;
      c.smile_beta = smile_beta;
      c.current_underlying = spot[s];
      c.current_atm_vol = atm_vol[s];
      c.horizon = horizon;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace epool
