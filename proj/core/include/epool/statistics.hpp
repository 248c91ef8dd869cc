#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "epool/scenario.hpp"

namespace epool {

using ColumnRef = Eigen::Ref<const Eigen::VectorXd>;

double weighted_mean(ColumnRef column, const ProbabilityVector& p);
double weighted_std(ColumnRef column, const ProbabilityVector& p);

/// Left order statistic v_{s(I)} where I is the largest prefix length whose
/// sorted cumulative weight does not exceed `level`. Falls back to the smallest
/// order statistic when even the first weight exceeds `level`.
double weighted_quantile(ColumnRef column, const ProbabilityVector& p, double level);
double weighted_median(ColumnRef column, const ProbabilityVector& p);

/// Interquartile range under the same quantile convention.
double weighted_iqr(ColumnRef column, const ProbabilityVector& p);

double weighted_correlation(ColumnRef first, ColumnRef second, const ProbabilityVector& p);
double weighted_correlation(const ViewPanel& panel, std::size_t k, std::size_t l, const ProbabilityVector& p);

/// Normalized ranks in (0, 1]; ties broken by row index.
Eigen::MatrixXd empirical_copula_ranks(const ViewPanel& panel);
Eigen::VectorXd empirical_copula_ranks(ColumnRef column);

/// Number of scenarios in the lower tail used by weighted_cvar: floor((1-gamma) J), at least 1.
std::size_t cvar_tail_size(std::size_t num_scenarios, double gamma);

/// Conditional value at risk of a p&l vector, reported as a positive loss.
double weighted_cvar(ColumnRef pnl, const ProbabilityVector& p, double gamma);

/// Scenario indices sorted ascending by value, ties by index.
std::vector<std::size_t> sorted_order(ColumnRef column);

struct WeightedStatistics {
  double mean = 0.0;
  double std = 0.0;
  double median = 0.0;
  std::map<double, double> quantiles;
  std::map<double, double> cvar;
};

WeightedStatistics describe(ColumnRef column, const ProbabilityVector& p, const std::vector<double>& quantile_levels,
                            const std::vector<double>& cvar_levels = {});

/// Probability-weighted correlation matrix of every pair of panel columns.
Eigen::MatrixXd weighted_correlation_matrix(const Eigen::MatrixXd& columns, const ProbabilityVector& p);

}  // namespace epool
