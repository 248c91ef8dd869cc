#include "epool/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epool/error.hpp"

namespace epool {

namespace {

// Absorbs rounding in accumulated prefix sums such as 0.1 + 0.1 + ... vs. level.
constexpr double kPrefixSlack = 1e-12;

void require_same_length(ColumnRef column, const ProbabilityVector& p) {
  EPOOL_REQUIRE(static_cast<std::size_t>(column.size()) == p.size(), InvalidArgument,
                "column length " + std::to_string(column.size()) + " does not match probability length " +
                    std::to_string(p.size()));
}

}  // namespace

double weighted_mean(ColumnRef column, const ProbabilityVector& p) {
  require_same_length(column, p);
  return p.weights().dot(column);
}

double weighted_std(ColumnRef column, const ProbabilityVector& p) {
  const double m = weighted_mean(column, p);
  const double var = p.weights().dot((column.array() - m).square().matrix());
  return std::sqrt(std::max(var, 0.0));
}

std::vector<std::size_t> sorted_order(ColumnRef column) {
  std::vector<std::size_t> order(static_cast<std::size_t>(column.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return column[static_cast<Eigen::Index>(a)] < column[static_cast<Eigen::Index>(b)];
  });
  return order;
}

double weighted_quantile(ColumnRef column, const ProbabilityVector& p, double level) {
  require_same_length(column, p);
  EPOOL_REQUIRE(level > 0.0 && level < 1.0, InvalidArgument, "quantile level must lie in (0,1)");
  const auto order = sorted_order(column);
  double cumulative = 0.0;
  std::size_t last = order.front();
  for (const auto j : order) {
    cumulative += p[j];
    if (cumulative > level + kPrefixSlack) break;
    last = j;
  }
  return column[static_cast<Eigen::Index>(last)];
}

double weighted_median(ColumnRef column, const ProbabilityVector& p) { return weighted_quantile(column, p, 0.5); }

double weighted_iqr(ColumnRef column, const ProbabilityVector& p) {
  return weighted_quantile(column, p, 0.75) - weighted_quantile(column, p, 0.25);
}

double weighted_correlation(ColumnRef first, ColumnRef second, const ProbabilityVector& p) {
  require_same_length(first, p);
  require_same_length(second, p);
  const double mk = weighted_mean(first, p);
  const double ml = weighted_mean(second, p);
  const double sk = weighted_std(first, p);
  const double sl = weighted_std(second, p);
  EPOOL_REQUIRE(sk > 0.0 && sl > 0.0, DegenerateData, "correlation undefined for a zero standard deviation");
  const double cross = p.weights().dot(first.cwiseProduct(second));
  return std::clamp((cross - mk * ml) / (sk * sl), -1.0, 1.0);
}

double weighted_correlation(const ViewPanel& panel, std::size_t k, std::size_t l, const ProbabilityVector& p) {
  EPOOL_REQUIRE(k < panel.num_columns() && l < panel.num_columns(), InvalidArgument, "column index out of range");
  return weighted_correlation(panel.columns.col(static_cast<Eigen::Index>(k)),
                              panel.columns.col(static_cast<Eigen::Index>(l)), p);
}

Eigen::VectorXd empirical_copula_ranks(ColumnRef column) {
  const auto order = sorted_order(column);
  const double J = static_cast<double>(column.size());
  Eigen::VectorXd ranks(column.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    ranks[static_cast<Eigen::Index>(order[r])] = static_cast<double>(r + 1) / J;
  }
  return ranks;
}

Eigen::MatrixXd empirical_copula_ranks(const ViewPanel& panel) {
  Eigen::MatrixXd u(panel.columns.rows(), panel.columns.cols());
  for (Eigen::Index k = 0; k < panel.columns.cols(); ++k) u.col(k) = empirical_copula_ranks(panel.columns.col(k));
  return u;
}

std::size_t cvar_tail_size(std::size_t num_scenarios, double gamma) {
  EPOOL_REQUIRE(gamma > 0.0 && gamma < 1.0, InvalidArgument, "CVaR tail level must lie in (0,1)");
  // 1e-9 keeps (1 - 0.9) * 10 from flooring to zero.
  const double raw = (1.0 - gamma) * static_cast<double>(num_scenarios);
  const auto size = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::clamp<std::size_t>(size, 1, num_scenarios);
}

double weighted_cvar(ColumnRef pnl, const ProbabilityVector& p, double gamma) {
  require_same_length(pnl, p);
  const std::size_t tail = cvar_tail_size(p.size(), gamma);
  const auto order = sorted_order(pnl);
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t r = 0; r < tail; ++r) {
    const auto j = order[r];
    mass += p[j];
    weighted += p[j] * pnl[static_cast<Eigen::Index>(j)];
  }
  EPOOL_REQUIRE(mass > 0.0, DegenerateData, "CVaR tail carries zero probability");
  return -weighted / mass;
}

WeightedStatistics describe(ColumnRef column, const ProbabilityVector& p, const std::vector<double>& quantile_levels,
                            const std::vector<double>& cvar_levels) {
  WeightedStatistics s;
  s.mean = weighted_mean(column, p);
  s.std = weighted_std(column, p);
  s.median = weighted_median(column, p);
  for (const double level : quantile_levels) s.quantiles[level] = weighted_quantile(column, p, level);
  for (const double gamma : cvar_levels) s.cvar[gamma] = weighted_cvar(column, p, gamma);
  return s;
}

Eigen::MatrixXd weighted_correlation_matrix(const Eigen::MatrixXd& columns, const ProbabilityVector& p) {
  const Eigen::Index K = columns.cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(K, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = k + 1; l < K; ++l) {
      c(k, l) = c(l, k) = weighted_correlation(columns.col(k), columns.col(l), p);
    }
  }
  return c;
}

}  // namespace epool
