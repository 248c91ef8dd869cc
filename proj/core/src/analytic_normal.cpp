#include "epool/analytic_normal.hpp"

#include <algorithm>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "epool/error.hpp"

namespace epool {

namespace {

// Smallest eigenvalue relative to the largest; LLT alone accepts matrices
// that are singular up to rounding.
double relative_min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  return top > 0.0 ? eig.eigenvalues().minCoeff() / top : 0.0;
}

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || relative_min_eigenvalue(m) <= 1e-12) {
    throw DegenerateData(std::string(what) + " is not positive definite");
  }
  return llt;
}

bool symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

NormalModel::NormalModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mu(std::move(mean)), sigma(std::move(covariance)) {
  EPOOL_REQUIRE(mu.size() >= 1, InvalidArgument, "normal model needs at least one dimension");
  EPOOL_REQUIRE(sigma.rows() == mu.size() && sigma.cols() == mu.size(), InvalidArgument,
                "covariance shape does not match the mean");
  EPOOL_REQUIRE(mu.allFinite() && sigma.allFinite(), InvalidArgument, "normal model has non-finite entries");
  EPOOL_REQUIRE(symmetric(sigma), InvalidArgument, "covariance is not symmetric");
  checked_cholesky(sigma, "covariance");
}

NormalModel normal_posterior(const NormalModel& reference, const NormalViewSpec& views) {
  const Eigen::Index n = reference.dimension();
  const Eigen::MatrixXd& sigma = reference.sigma;
  Eigen::VectorXd mu = reference.mu;
  Eigen::MatrixXd cov = sigma;

  EPOOL_REQUIRE(views.q.has_value() == views.mu_q.has_value(), InvalidArgument,
                "mean views need both the pick matrix and the target means");
  EPOOL_REQUIRE(views.g.has_value() == views.sigma_g.has_value(), InvalidArgument,
                "covariance views need both the pick matrix and the target covariance");

  if (views.q) {
    const Eigen::MatrixXd& q = *views.q;
    EPOOL_REQUIRE(q.cols() == n && views.mu_q->size() == q.rows(), InvalidArgument, "mean view shapes do not conform");
    const Eigen::MatrixXd sq = sigma * q.transpose();
    const auto llt = checked_cholesky(q * sq, "Q Sigma Q'");
    mu += sq * llt.solve(*views.mu_q - q * reference.mu);
  }
  if (views.g) {
    const Eigen::MatrixXd& g = *views.g;
    const Eigen::MatrixXd& target = *views.sigma_g;
    EPOOL_REQUIRE(g.cols() == n && target.rows() == g.rows() && target.cols() == g.rows(), InvalidArgument,
                  "covariance view shapes do not conform");
    EPOOL_REQUIRE(symmetric(target), InvalidArgument, "target covariance is not symmetric");
    const Eigen::MatrixXd gs = g * sigma;  // G Sigma
    const auto llt = checked_cholesky(gs * g.transpose(), "G Sigma G'");
    // (G S G')^-1 T (G S G')^-1 - (G S G')^-1, each inverse applied by a solve.
    const Eigen::MatrixXd left = llt.solve(target);
    const Eigen::MatrixXd middle = llt.solve(left.transpose()).transpose() -
                                   llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.rows()));
    cov = sigma + gs.transpose() * middle * gs;
    cov = (0.5 * (cov + cov.transpose())).eval();
  }
  Eigen::LLT<Eigen::MatrixXd> check(cov);
  if (check.info() != Eigen::Success ||
      relative_min_eigenvalue(cov) <= 64.0 * std::numeric_limits<double>::epsilon()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "posterior covariance is not positive definite (smallest eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw DegenerateData(msg.str());
  }
  NormalModel out;
  out.mu = std::move(mu);
  out.sigma = std::move(cov);
  return out;
}

double kl_normals(const NormalModel& a, const NormalModel& b) {
  EPOOL_REQUIRE(a.dimension() == b.dimension(), InvalidArgument, "KL between normals of different dimension");
  const auto n = static_cast<double>(a.dimension());
  const auto lb = checked_cholesky(b.sigma, "reference covariance");
  const auto la = checked_cholesky(a.sigma, "covariance");
  auto log_det = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  if (a.mu == b.mu && a.sigma == b.sigma) return 0.0;
  const Eigen::VectorXd diff = a.mu - b.mu;
  const double trace = lb.solve(a.sigma).trace();
  const double quad = diff.dot(lb.solve(diff));
  // 1/2 ln|Sa^-1 Sb| - n/2 + 1/2 tr(Sa Sb^-1) + 1/2 d' Sb^-1 d
  const double kl = 0.5 * (log_det(lb) - log_det(la)) - 0.5 * n + 0.5 * trace + 0.5 * quad;
  return std::max(kl, 0.0);
}

std::vector<std::pair<double, NormalModel>> NormalMixture::effective_components() const {
  std::vector<std::pair<double, NormalModel>> out;
  for (const auto& c : components) {
    if (c.first > 0.0) out.push_back(c);
  }
  return out;
}

Eigen::VectorXd NormalMixture::mean() const {
  EPOOL_REQUIRE(!components.empty(), InvalidArgument, "empty mixture");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(components.front().second.dimension());
  for (const auto& [w, model] : components) m += w * model.mu;
  return m;
}

Eigen::MatrixXd NormalMixture::covariance() const {
  const Eigen::VectorXd m = mean();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m.size(), m.size());
  for (const auto& [w, model] : components) {
    const Eigen::VectorXd d = model.mu - m;
    c += w * (model.sigma + d * d.transpose());
  }
  return c;
}

NormalMixture mixture_posterior(const NormalModel& reference, const NormalModel& full_confidence, double c) {
  EPOOL_REQUIRE(c >= 0.0 && c <= 1.0, InvalidArgument, "confidence must lie in [0,1]");
  EPOOL_REQUIRE(reference.dimension() == full_confidence.dimension(), InvalidArgument,
                "mixture components have different dimensions");
  NormalMixture mix;
  mix.components.emplace_back(1.0 - c, reference);
  mix.components.emplace_back(c, full_confidence);
  return mix;
}

std::pair<ScenarioPanel, ProbabilityVector> discretize(const NormalModel& model, std::size_t num_scenarios,
                                                       std::uint64_t seed, std::vector<std::string> factor_names,
                                                       Discretization scheme) {
  EPOOL_REQUIRE(num_scenarios >= 100, InvalidArgument, "discretize needs at least 100 scenarios");
  const Eigen::Index n = model.dimension();
  if (factor_names.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) factor_names.push_back("X" + std::to_string(i + 1));
  }
  EPOOL_REQUIRE(static_cast<Eigen::Index>(factor_names.size()) == n, InvalidArgument,
                "factor name count does not match the model dimension");
  const Eigen::MatrixXd chol = checked_cholesky(model.sigma, "covariance").matrixL();
  std::mt19937_64 rng(seed);
  const auto J = static_cast<Eigen::Index>(num_scenarios);
  Eigen::MatrixXd z(J, n);
  if (scheme == Discretization::MonteCarlo) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index i = 0; i < n; ++i) z(j, i) = normal(rng);
  } else {
    // Latin hypercube: one uniform draw per stratum [k/J, (k+1)/J) per
    // coordinate, strata independently permuted across coordinates.
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const boost::math::normal_distribution<double> standard;
    std::vector<Eigen::Index> strata(static_cast<std::size_t>(J));
    for (Eigen::Index i = 0; i < n; ++i) {
      std::iota(strata.begin(), strata.end(), Eigen::Index{0});
      std::shuffle(strata.begin(), strata.end(), rng);
      for (Eigen::Index j = 0; j < J; ++j) {
        double u = (static_cast<double>(strata[static_cast<std::size_t>(j)]) + uniform(rng)) / static_cast<double>(J);
        u = std::clamp(u, 1e-300, 1.0 - 1e-16);
        z(j, i) = boost::math::quantile(standard, u);
      }
    }
  }
  Eigen::MatrixXd data = (z * chol.transpose()).rowwise() + model.mu.transpose();
  return {ScenarioPanel(std::move(factor_names), std::move(data)), ProbabilityVector::uniform(num_scenarios)};
}

}  // namespace epool
