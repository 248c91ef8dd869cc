#include "epool/analytic_comparison.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epool/error.hpp"

namespace epool {

LinearConstraintSet normal_view_constraints(const ScenarioPanel& panel, const NormalViewSpec& views,
                                            const Eigen::VectorXd& posterior_mean) {
  const Eigen::MatrixXd& X = panel.data();
  ConstraintRows rows(panel.num_scenarios());
  Eigen::MatrixXd spanned(0, X.cols());
  auto adds_rank = [&](const Eigen::RowVectorXd& r) {
    Eigen::MatrixXd stacked(spanned.rows() + 1, X.cols());
    stacked << spanned, r;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
    lu.setThreshold(1e-10);
    if (lu.rank() <= spanned.rows()) return false;
    spanned = std::move(stacked);
    return true;
  };

  if (views.q) {
    EPOOL_REQUIRE(views.q->cols() == X.cols() && views.mu_q && views.mu_q->size() == views.q->rows(),
                  InvalidArgument, "mean view blocks have inconsistent shapes");
    for (Eigen::Index k = 0; k < views.q->rows(); ++k) {
      const Eigen::RowVectorXd q = views.q->row(k);
      EPOOL_REQUIRE(adds_rank(q), DegenerateData, "mean view rows are linearly dependent");
      rows.add(X * q.transpose(), Direction::Equal, (*views.mu_q)[k], "mean q" + std::to_string(k + 1));
    }
  }
  if (views.g) {
    EPOOL_REQUIRE(views.g->cols() == X.cols() && views.sigma_g && views.sigma_g->rows() == views.g->rows() &&
                      views.sigma_g->cols() == views.g->rows(),
                  InvalidArgument, "covariance view blocks have inconsistent shapes");
    const Eigen::MatrixXd GX = X * views.g->transpose();
    const Eigen::VectorXd m = *views.g * posterior_mean;
    for (Eigen::Index k = 0; k < GX.cols(); ++k) {
      if (adds_rank(views.g->row(k)))
        rows.add(GX.col(k), Direction::Equal, m[k], "mean g" + std::to_string(k + 1));
    }
    for (Eigen::Index k = 0; k < GX.cols(); ++k) {
      for (Eigen::Index l = k; l < GX.cols(); ++l) {
        rows.add(GX.col(k).cwiseProduct(GX.col(l)), Direction::Equal, (*views.sigma_g)(k, l) + m[k] * m[l],
                 "second moment g" + std::to_string(k + 1) + "g" + std::to_string(l + 1));
      }
    }
  }
  return LinearConstraintSet::from_rows(rows);
}

AnalyticalComparison compare_analytical(const NormalModel& reference, const NormalViewSpec& views,
                                        std::size_t num_scenarios, std::uint64_t seed,
                                        const SolverConfig& config, Discretization scheme) {
  AnalyticalComparison out{.analytical = normal_posterior(reference, views),
                           .numerical_mean = {},
                           .numerical_covariance = {},
                           .solve = {.posterior = ProbabilityVector::uniform(1)}};
  const auto [panel, prior] = discretize(reference, num_scenarios, seed, {}, scheme);
  const auto constraints = normal_view_constraints(panel, views, out.analytical.mu);
  out.solve = solve(constraints, prior, config);

  const Eigen::VectorXd& w = out.solve.posterior.weights();
  out.numerical_mean = panel.data().transpose() * w;
  const Eigen::MatrixXd centered = panel.data().rowwise() - out.numerical_mean.transpose();
  out.numerical_covariance = centered.transpose() * w.asDiagonal() * centered;

  out.max_mean_gap = (out.numerical_mean - out.analytical.mu).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < out.analytical.mu.size(); ++i) {
    const double sd_num = std::sqrt(out.numerical_covariance(i, i));
    const double sd_ana = std::sqrt(out.analytical.sigma(i, i));
    out.max_relative_std_gap = std::max(out.max_relative_std_gap, std::abs(sd_num / sd_ana - 1.0));
  }
  return out;
}

}  // namespace epool
