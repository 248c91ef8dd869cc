#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace epool {

enum class ViewKind {
  MeanLocation,
  MedianLocation,
  Ranking,
  VolatilityStd,
  VolatilityQuantileRange,
  CorrelationStress,
  QuantileTail,
  TailCodependence,
  MarginalMoments,
  CopulaMoments,
  JointMoments,
};

enum class Direction { LessEqual, Equal, GreaterEqual };

enum class TargetMode { Absolute, KappaSigma, QuantileShift, ReferenceMultiple };

/// Reference dispersion used by KappaSigma targets. The two choices are not
/// on a comparable scale: one kappa under InterquartileRange is about 1.35
/// kappas under StandardDeviation for normal data.
enum class Dispersion { StandardDeviation, InterquartileRange };

struct TargetSpec {
  TargetMode mode = TargetMode::Absolute;
  double value = 0.0;
  Dispersion dispersion = Dispersion::StandardDeviation;

  static TargetSpec absolute(double v) { return {TargetMode::Absolute, v, Dispersion::StandardDeviation}; }
  static TargetSpec kappa_sigma(double kappa, Dispersion d = Dispersion::StandardDeviation) {
    return {TargetMode::KappaSigma, kappa, d};
  }
  static TargetSpec quantile_shift(double kappa) {
    return {TargetMode::QuantileShift, kappa, Dispersion::StandardDeviation};
  }
  static TargetSpec reference_multiple(double kappa) {
    return {TargetMode::ReferenceMultiple, kappa, Dispersion::StandardDeviation};
  }
};

/// A statement about the posterior distribution of one or more derived columns.
///
/// `columns` hold ColumnExpression strings; kind-specific parameters live in
/// the optional fields and are validated by the compiler for the kinds that use them.
struct View {
  ViewKind kind = ViewKind::MeanLocation;
  std::vector<std::string> columns;
  Direction direction = Direction::Equal;
  std::optional<TargetSpec> target;
  int order = 1;
  std::optional<double> confidence;
  std::string id;

  /// Tail level (QuantileTail) or joint copula thresholds (TailCodependence).
  std::vector<double> thresholds;
  /// Half-width of the central probability range (VolatilityQuantileRange).
  std::optional<double> gamma;
  /// Pin both means and second moments alongside a correlation stress.
  bool anchor = true;
  /// Homogeneous shrinkage weights (identity, reference, ones) for CorrelationStress.
  std::optional<Eigen::Vector3d> shrinkage;
  /// Sample drawn from the target distribution for the moment-matching kinds.
  std::optional<Eigen::MatrixXd> target_sample;
};

std::string_view to_string(ViewKind kind);
std::string_view to_string(Direction direction);
std::string_view to_string(TargetMode mode);
std::string_view to_string(Dispersion dispersion);
ViewKind parse_view_kind(std::string_view text);
Direction parse_direction(std::string_view text);
TargetMode parse_target_mode(std::string_view text);
Dispersion parse_dispersion(std::string_view text);

/// Checks the structural invariants of a view (column counts, target presence and range).
void validate(const View& view);

}  // namespace epool
