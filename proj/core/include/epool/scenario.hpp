#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace epool {

/// Tolerance on |sum(weights) - 1| accepted by ProbabilityVector.
inline constexpr double kProbabilitySumTolerance = 1e-12;

/// Nonnegative scenario weights summing to one.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Eigen::VectorXd weights);

  static ProbabilityVector uniform(std::size_t size);

  /// Rescales `weights` to unit sum, but only if they already sum to one within
  /// `tolerance`; larger drift throws InvalidArgument. Weights whose sum is
  /// off by summation rounding only are kept bit for bit.
  static ProbabilityVector renormalized(Eigen::VectorXd weights, double tolerance);

  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t j) const { return weights_[static_cast<Eigen::Index>(j)]; }
  bool strictly_positive() const noexcept { return (weights_.array() > 0.0).all(); }

 private:
  Eigen::VectorXd weights_;
};

/// J x N matrix of joint risk-factor scenarios with unique factor names.
class ScenarioPanel {
 public:
  ScenarioPanel(std::vector<std::string> factor_names, Eigen::MatrixXd data);

  const std::vector<std::string>& factor_names() const noexcept { return names_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  std::size_t num_scenarios() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t num_factors() const noexcept { return static_cast<std::size_t>(data_.cols()); }

  /// Index of the named factor, or throws InvalidArgument.
  std::size_t factor_index(const std::string& name) const;
  bool has_factor(const std::string& name) const noexcept;
  Eigen::VectorXd column(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd data_;
};

/// Derived columns V = g(X) evaluated scenario by scenario.
struct ViewPanel {
  Eigen::MatrixXd columns;
  std::vector<std::string> labels;

  std::size_t num_scenarios() const noexcept { return static_cast<std::size_t>(columns.rows()); }
  std::size_t num_columns() const noexcept { return static_cast<std::size_t>(columns.cols()); }
  std::size_t label_index(const std::string& label) const;
};

// CSV panel: header row of factor names, one scenario per following row.
ScenarioPanel read_panel_csv(const std::filesystem::path& path);
ScenarioPanel parse_panel_csv(const std::string& text);
void write_panel_csv(const ScenarioPanel& panel, const std::filesystem::path& path);
std::string format_panel_csv(const ScenarioPanel& panel);

// Probability file: one weight per line. Sums off by more than 1e-9 are rejected.
inline constexpr double kProbabilityFileTolerance = 1e-9;
ProbabilityVector read_probabilities(const std::filesystem::path& path, std::size_t expected_size);
ProbabilityVector parse_probabilities(const std::string& text, std::size_t expected_size);
void write_probabilities(const ProbabilityVector& p, const std::filesystem::path& path);
std::string format_probabilities(const ProbabilityVector& p);

/// Shortest round-trip decimal for a double (17 significant digits).
std::string format_double(double value);

}  // namespace epool
