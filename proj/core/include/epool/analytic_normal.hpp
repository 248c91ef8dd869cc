#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epool/scenario.hpp"

namespace epool {

/// Multivariate normal N(mu, sigma) with symmetric positive definite sigma.
struct NormalModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  NormalModel() = default;
  NormalModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  Eigen::Index dimension() const noexcept { return mu.size(); }
};

/// Full-confidence views on a normal reference:
/// E[Q X] = mu_q and Cov[G X] = sigma_g. Either block may be omitted.
struct NormalViewSpec {
  std::optional<Eigen::MatrixXd> q;
  std::optional<Eigen::VectorXd> mu_q;
  std::optional<Eigen::MatrixXd> g;
  std::optional<Eigen::MatrixXd> sigma_g;
};

struct NormalMixture {
  std::vector<std::pair<double, NormalModel>> components;

  /// Components carrying positive weight.
  std::vector<std::pair<double, NormalModel>> effective_components() const;
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;
};

/// Closed-form minimum-relative-entropy posterior of a normal reference
/// under mean views on Q X and covariance views on G X. Throws DegenerateData
/// when Q sigma Q' or G sigma G' is singular, or when the resulting covariance
/// is not positive definite (the message names the smallest eigenvalue).
NormalModel normal_posterior(const NormalModel& reference, const NormalViewSpec& views);

/// KL(a || b) between two normals of equal dimension.
double kl_normals(const NormalModel& a, const NormalModel& b);

/// Opinion pool (1-c) reference + c posterior as a two-component mixture.
NormalMixture mixture_posterior(const NormalModel& reference, const NormalModel& full_confidence, double c);

enum class Discretization {
  MonteCarlo,  ///< independent normal draws
  Stratified,  ///< Latin hypercube in the standard-normal coordinates, then x = mu + L z
};

/// J equally weighted pseudo-random draws; deterministic in `seed`.
std::pair<ScenarioPanel, ProbabilityVector> discretize(const NormalModel& model, std::size_t num_scenarios,
                                                       std::uint64_t seed,
                                                       std::vector<std::string> factor_names = {},
                                                       Discretization scheme = Discretization::Stratified);

}  // namespace epool
