#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epool/scenario.hpp"
#include "epool/views.hpp"

namespace epool {

/// Rows of linear constraints on a probability vector in normal form:
/// inequalities F x <= f and equalities H x = h. Rows are labelled for diagnostics.
class ConstraintRows {
 public:
  explicit ConstraintRows(std::size_t num_scenarios) : num_scenarios_(num_scenarios) {}

  /// Adds `coefficients . x (direction) rhs`; >= rows are negated into <= form.
  /// Throws DegenerateData for all-zero rows and InvalidArgument for non-finite entries.
  void add(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Direction direction, double rhs,
           std::string label = {});
  void append(const ConstraintRows& other);

  std::size_t num_scenarios() const noexcept { return num_scenarios_; }
  std::size_t num_inequalities() const noexcept { return ineq_rows_.size(); }
  std::size_t num_equalities() const noexcept { return eq_rows_.size(); }
  std::size_t size() const noexcept { return num_inequalities() + num_equalities(); }

  const std::vector<Eigen::VectorXd>& inequality_rows() const noexcept { return ineq_rows_; }
  const std::vector<double>& inequality_rhs() const noexcept { return ineq_rhs_; }
  const std::vector<Eigen::VectorXd>& equality_rows() const noexcept { return eq_rows_; }
  const std::vector<double>& equality_rhs() const noexcept { return eq_rhs_; }
  const std::vector<std::string>& inequality_labels() const noexcept { return ineq_labels_; }
  const std::vector<std::string>& equality_labels() const noexcept { return eq_labels_; }

 private:
  std::size_t num_scenarios_;
  std::vector<Eigen::VectorXd> ineq_rows_;
  std::vector<double> ineq_rhs_;
  std::vector<std::string> ineq_labels_;
  std::vector<Eigen::VectorXd> eq_rows_;
  std::vector<double> eq_rhs_;
  std::vector<std::string> eq_labels_;
};

/// Complete constraint system. Equality row 0 is always the normalization 1'x = 1.
struct LinearConstraintSet {
  Eigen::MatrixXd F;
  Eigen::VectorXd f;
  Eigen::MatrixXd H;
  Eigen::VectorXd h;
  std::vector<std::string> inequality_labels;
  std::vector<std::string> equality_labels;

  /// Normalization row followed by `rows`.
  static LinearConstraintSet from_rows(const ConstraintRows& rows);
  static LinearConstraintSet normalization_only(std::size_t num_scenarios);

  std::size_t num_scenarios() const noexcept { return static_cast<std::size_t>(H.cols()); }
  std::size_t num_inequalities() const noexcept { return static_cast<std::size_t>(F.rows()); }
  std::size_t num_equalities() const noexcept { return static_cast<std::size_t>(H.rows()); }

  /// Largest positive part of F x - f and |H x - h|.
  double max_violation(const Eigen::VectorXd& x) const;
};

struct CompileOptions {
  std::size_t max_moment_rows = 200;
};

// Per-kind compilers. Target resolution always uses the prior.
ConstraintRows compile_mean_location(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_median_location(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_ranking(const View& view, const ViewPanel& panel);
ConstraintRows compile_volatility_std(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_volatility_quantile_range(const View& view, const ViewPanel& panel,
                                                 const ProbabilityVector& prior);
ConstraintRows compile_correlation_stress(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_quantile_tail(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_tail_codependence(const View& view, const ViewPanel& panel, const ProbabilityVector& prior);
ConstraintRows compile_moment_matching(const View& view, const ViewPanel& panel, const ProbabilityVector& prior,
                                       const CompileOptions& options = {});

/// Dispatches on view.kind.
ConstraintRows compile_view(const View& view, const ViewPanel& panel, const ProbabilityVector& prior,
                            const CompileOptions& options = {});

/// Every view's columns must be labels of `panel`.
LinearConstraintSet compile(const std::vector<View>& views, const ViewPanel& panel, const ProbabilityVector& prior,
                            const CompileOptions& options = {});

/// Evaluates each distinct column expression on `panel`, then compiles.
LinearConstraintSet compile(const std::vector<View>& views, const ScenarioPanel& panel,
                            const ProbabilityVector& prior, const CompileOptions& options = {});

/// Every ColumnExpression referenced by `views`, deduplicated, in first-use order, evaluated on `panel`.
ViewPanel view_panel_for(const std::vector<View>& views, const ScenarioPanel& panel);

/// Homogeneous shrinkage rho1 I + rho2 C + rho3 11'. Weights must be nonnegative and sum to one.
Eigen::MatrixXd shrinkage_target(const Eigen::MatrixXd& reference_correlation, const Eigen::Vector3d& rho);

/// Number of rows a moment-matching view of this kind produces for K columns.
std::size_t moment_row_count(ViewKind kind, std::size_t num_columns, int order);

/// Multi-indices (column index lists, nondecreasing) of every monomial of total degree 1..order.
std::vector<std::vector<std::size_t>> monomials_up_to(std::size_t num_columns, int order);

}  // namespace epool
