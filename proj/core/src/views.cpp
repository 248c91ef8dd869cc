#include "epool/views.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "epool/error.hpp"

namespace epool {

namespace {

constexpr std::array<std::pair<ViewKind, std::string_view>, 11> kKindNames{{
    {ViewKind::MeanLocation, "MeanLocation"},
    {ViewKind::MedianLocation, "MedianLocation"},
    {ViewKind::Ranking, "Ranking"},
    {ViewKind::VolatilityStd, "VolatilityStd"},
    {ViewKind::VolatilityQuantileRange, "VolatilityQuantileRange"},
    {ViewKind::CorrelationStress, "CorrelationStress"},
    {ViewKind::QuantileTail, "QuantileTail"},
    {ViewKind::TailCodependence, "TailCodependence"},
    {ViewKind::MarginalMoments, "MarginalMoments"},
    {ViewKind::CopulaMoments, "CopulaMoments"},
    {ViewKind::JointMoments, "JointMoments"},
}};

constexpr std::array<std::pair<TargetMode, std::string_view>, 4> kModeNames{{
    {TargetMode::Absolute, "Absolute"},
    {TargetMode::KappaSigma, "KappaSigma"},
    {TargetMode::QuantileShift, "QuantileShift"},
    {TargetMode::ReferenceMultiple, "ReferenceMultiple"},
}};

bool is_moment_kind(ViewKind k) {
  return k == ViewKind::MarginalMoments || k == ViewKind::CopulaMoments || k == ViewKind::JointMoments;
}

}  // namespace

std::string_view to_string(ViewKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::LessEqual: return "<=";
    case Direction::Equal: return "=";
    case Direction::GreaterEqual: return ">=";
  }
  return "?";
}

std::string_view to_string(TargetMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::string_view to_string(Dispersion dispersion) {
  return dispersion == Dispersion::StandardDeviation ? "std" : "iqr";
}

ViewKind parse_view_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw ParseError("unknown view kind '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  if (text == "<=" || text == "≤") return Direction::LessEqual;
  if (text == "=" || text == "==") return Direction::Equal;
  if (text == ">=" || text == "≥") return Direction::GreaterEqual;
  throw ParseError("unknown direction '" + std::string(text) + "'");
}

TargetMode parse_target_mode(std::string_view text) {
  for (const auto& [m, name] : kModeNames) {
    if (name == text) return m;
  }
  throw ParseError("unknown target mode '" + std::string(text) + "'");
}

Dispersion parse_dispersion(std::string_view text) {
  if (text == "std") return Dispersion::StandardDeviation;
  if (text == "iqr") return Dispersion::InterquartileRange;
  throw ParseError("unknown dispersion '" + std::string(text) + "'");
}

void validate(const View& view) {
  const auto kind = std::string(to_string(view.kind));
  EPOOL_REQUIRE(!view.columns.empty(), InvalidArgument, kind + " view needs at least one column");
  if (view.confidence) {
    EPOOL_REQUIRE(*view.confidence >= 0.0 && *view.confidence <= 1.0, InvalidArgument,
                  "view confidence must lie in [0,1]");
  }
  switch (view.kind) {
    case ViewKind::Ranking:
      EPOOL_REQUIRE(view.columns.size() >= 2, InvalidArgument, "Ranking view needs at least 2 columns");
      EPOOL_REQUIRE(!view.target, InvalidArgument, "Ranking view takes no target");
      break;
    case ViewKind::CorrelationStress:
      EPOOL_REQUIRE(view.columns.size() == 2, InvalidArgument, "CorrelationStress view needs exactly 2 columns");
      if (view.target) {
        EPOOL_REQUIRE(view.target->mode == TargetMode::Absolute, InvalidArgument,
                      "CorrelationStress target must be Absolute");
        EPOOL_REQUIRE(view.target->value >= -1.0 && view.target->value <= 1.0, InvalidArgument,
                      "target correlation must lie in [-1,1]");
      } else {
        EPOOL_REQUIRE(view.shrinkage.has_value(), InvalidArgument,
                      "CorrelationStress needs a target correlation or shrinkage weights");
      }
      break;
    case ViewKind::TailCodependence:
      EPOOL_REQUIRE(view.columns.size() >= 2, InvalidArgument, "TailCodependence view needs at least 2 columns");
      EPOOL_REQUIRE(view.thresholds.size() == view.columns.size(), InvalidArgument,
                    "TailCodependence needs one threshold per column");
      EPOOL_REQUIRE(view.target.has_value(), InvalidArgument, "TailCodependence view needs a target");
      break;
    case ViewKind::QuantileTail:
      EPOOL_REQUIRE(view.columns.size() == 1, InvalidArgument, "QuantileTail view takes exactly one column");
      EPOOL_REQUIRE(view.thresholds.size() == 1, InvalidArgument, "QuantileTail view needs one tail level u");
      break;
    case ViewKind::MarginalMoments:
    case ViewKind::CopulaMoments:
    case ViewKind::JointMoments:
      EPOOL_REQUIRE(view.order >= 1, InvalidArgument, "moment order must be at least 1");
      EPOOL_REQUIRE(view.target_sample.has_value(), InvalidArgument, "moment-matching view needs a target sample");
      EPOOL_REQUIRE(view.target_sample->cols() == static_cast<Eigen::Index>(view.columns.size()), InvalidArgument,
                    "target sample width must equal the number of columns");
      EPOOL_REQUIRE(view.target_sample->rows() >= 1, InvalidArgument, "target sample is empty");
      break;
    case ViewKind::VolatilityQuantileRange:
      EPOOL_REQUIRE(view.columns.size() == 1, InvalidArgument, "VolatilityQuantileRange takes exactly one column");
      EPOOL_REQUIRE(view.gamma.has_value(), InvalidArgument, "VolatilityQuantileRange needs gamma");
      EPOOL_REQUIRE(*view.gamma > 0.0 && *view.gamma < 0.5, InvalidArgument, "gamma must lie in (0, 1/2)");
      EPOOL_REQUIRE(view.target.has_value(), InvalidArgument, "VolatilityQuantileRange needs a target multiplier");
      break;
    case ViewKind::MeanLocation:
    case ViewKind::MedianLocation:
    case ViewKind::VolatilityStd:
      EPOOL_REQUIRE(view.columns.size() == 1, InvalidArgument, kind + " view takes exactly one column");
      EPOOL_REQUIRE(view.target.has_value(), InvalidArgument, kind + " view needs a target");
      break;
  }
  if (view.target) {
    EPOOL_REQUIRE(std::isfinite(view.target->value), InvalidArgument, "target value must be finite");
  }
  if (!is_moment_kind(view.kind)) {
    EPOOL_REQUIRE(!view.target_sample.has_value(), InvalidArgument, "target_sample only applies to moment views");
  }
}

}  // namespace epool
