#include "epool/view_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "epool/error.hpp"
#include "epool/expression.hpp"
#include "epool/statistics.hpp"

namespace epool {

namespace {

// (1/2 + kappa/5)-tile mapping stays inside (0,1) only for |kappa| < 2.5.
constexpr double kMaxQuantileShift = 2.5;

Eigen::VectorXd view_column(const View& view, const ViewPanel& panel, std::size_t which = 0) {
  EPOOL_REQUIRE(which < view.columns.size(), InvalidArgument, "view has too few columns");
  return panel.columns.col(static_cast<Eigen::Index>(panel.label_index(view.columns[which])));
}

std::string describe(const View& view) {
  std::string s(to_string(view.kind));
  s += '(';
  for (std::size_t i = 0; i < view.columns.size(); ++i) {
    if (i) s += ", ";
    s += view.columns[i];
  }
  s += ')';
  if (!view.id.empty()) s = view.id + ": " + s;
  return s;
}

const TargetSpec& require_target(const View& view) {
  EPOOL_REQUIRE(view.target.has_value(), InvalidArgument, describe(view) + " needs a target");
  return *view.target;
}

double tile_level(double kappa) {
  EPOOL_REQUIRE(std::abs(kappa) < kMaxQuantileShift, InvalidArgument,
                "quantile shift kappa must satisfy |kappa| < 2.5");
  return 0.5 + kappa / 5.0;
}

double dispersion(Eigen::Ref<const Eigen::VectorXd> column, const ProbabilityVector& prior, Dispersion d) {
  return d == Dispersion::StandardDeviation ? weighted_std(column, prior) : weighted_iqr(column, prior);
}

/// Resolves a location target; `base` is the prior location the kappa shift starts from.
double resolve_location(const View& view, Eigen::Ref<const Eigen::VectorXd> column, const ProbabilityVector& prior,
                        double base) {
  const auto& target = require_target(view);
  switch (target.mode) {
    case TargetMode::Absolute:
      return target.value;
    case TargetMode::KappaSigma: {
      const double sigma = dispersion(column, prior, target.dispersion);
      EPOOL_REQUIRE(sigma > 0.0, DegenerateData, describe(view) + ": zero prior dispersion with KappaSigma target");
      return base + target.value * sigma;
    }
    case TargetMode::QuantileShift:
      return weighted_quantile(column, prior, tile_level(target.value));
    case TargetMode::ReferenceMultiple:
      break;
  }
  throw InvalidArgument(describe(view) + ": ReferenceMultiple does not apply to location views");
}

Eigen::VectorXd indicator(Eigen::Ref<const Eigen::VectorXd> column, const std::function<bool(double)>& keep) {
  Eigen::VectorXd row(column.size());
  for (Eigen::Index j = 0; j < column.size(); ++j) row[j] = keep(column[j]) ? 1.0 : 0.0;
  return row;
}

void require_nonempty(const Eigen::VectorXd& row, const View& view, const std::string& what) {
  EPOOL_REQUIRE(row.sum() > 0.0, DegenerateData, describe(view) + ": " + what + " selects no scenario");
}

void require_same_scenarios(const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(panel.num_scenarios() == prior.size(), InvalidArgument,
                "view panel and prior have different scenario counts");
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void collect_monomials(std::size_t num_columns, std::size_t degree, std::size_t start, std::vector<std::size_t>& current,
                       std::vector<std::vector<std::size_t>>& out, bool distinct) {
  if (current.size() == degree) {
    out.push_back(current);
    return;
  }
  for (std::size_t k = start; k < num_columns; ++k) {
    current.push_back(k);
    collect_monomials(num_columns, degree, distinct ? k + 1 : k, current, out, distinct);
    current.pop_back();
  }
}

Eigen::VectorXd monomial_column(const Eigen::MatrixXd& data, const std::vector<std::size_t>& index) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(data.rows());
  for (const auto k : index) v = v.cwiseProduct(data.col(static_cast<Eigen::Index>(k)));
  return v;
}

std::string monomial_label(const View& view, const std::vector<std::size_t>& index) {
  std::string s = describe(view) + " moment E[";
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i) s += '*';
    s += view.columns[index[i]];
  }
  return s + "]";
}

}  // namespace

void ConstraintRows::add(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Direction direction, double rhs,
                         std::string label) {
  EPOOL_REQUIRE(static_cast<std::size_t>(coefficients.size()) == num_scenarios_, InvalidArgument,
                "constraint row length does not match the scenario count");
  EPOOL_REQUIRE(coefficients.allFinite() && std::isfinite(rhs), InvalidArgument,
                "constraint row '" + label + "' has non-finite entries");
  EPOOL_REQUIRE(coefficients.cwiseAbs().maxCoeff() > 0.0, DegenerateData,
                "constraint row '" + label + "' is identically zero");
  switch (direction) {
    case Direction::LessEqual:
      ineq_rows_.emplace_back(coefficients);
      ineq_rhs_.push_back(rhs);
      ineq_labels_.push_back(std::move(label));
      break;
    case Direction::GreaterEqual:
      ineq_rows_.emplace_back(-coefficients);
      ineq_rhs_.push_back(-rhs);
      ineq_labels_.push_back(std::move(label));
      break;
    case Direction::Equal:
      eq_rows_.emplace_back(coefficients);
      eq_rhs_.push_back(rhs);
      eq_labels_.push_back(std::move(label));
      break;
  }
}

void ConstraintRows::append(const ConstraintRows& other) {
  EPOOL_REQUIRE(other.num_scenarios_ == num_scenarios_, InvalidArgument, "constraint rows over different panels");
  ineq_rows_.insert(ineq_rows_.end(), other.ineq_rows_.begin(), other.ineq_rows_.end());
  ineq_rhs_.insert(ineq_rhs_.end(), other.ineq_rhs_.begin(), other.ineq_rhs_.end());
  ineq_labels_.insert(ineq_labels_.end(), other.ineq_labels_.begin(), other.ineq_labels_.end());
  eq_rows_.insert(eq_rows_.end(), other.eq_rows_.begin(), other.eq_rows_.end());
  eq_rhs_.insert(eq_rhs_.end(), other.eq_rhs_.begin(), other.eq_rhs_.end());
  eq_labels_.insert(eq_labels_.end(), other.eq_labels_.begin(), other.eq_labels_.end());
}

LinearConstraintSet LinearConstraintSet::from_rows(const ConstraintRows& rows) {
  const auto J = static_cast<Eigen::Index>(rows.num_scenarios());
  EPOOL_REQUIRE(J > 0, InvalidArgument, "constraint set over zero scenarios");
  LinearConstraintSet set;
  const auto mi = static_cast<Eigen::Index>(rows.num_inequalities());
  const auto me = static_cast<Eigen::Index>(rows.num_equalities());
  set.F.resize(mi, J);
  set.f.resize(mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    set.F.row(i) = rows.inequality_rows()[static_cast<std::size_t>(i)].transpose();
    set.f[i] = rows.inequality_rhs()[static_cast<std::size_t>(i)];
  }
  set.H.resize(me + 1, J);
  set.h.resize(me + 1);
  set.H.row(0).setOnes();
  set.h[0] = 1.0;
  for (Eigen::Index i = 0; i < me; ++i) {
    set.H.row(i + 1) = rows.equality_rows()[static_cast<std::size_t>(i)].transpose();
    set.h[i + 1] = rows.equality_rhs()[static_cast<std::size_t>(i)];
  }
  set.inequality_labels = rows.inequality_labels();
  set.equality_labels.reserve(static_cast<std::size_t>(me + 1));
  set.equality_labels.emplace_back("normalization");
  set.equality_labels.insert(set.equality_labels.end(), rows.equality_labels().begin(), rows.equality_labels().end());
  return set;
}

LinearConstraintSet LinearConstraintSet::normalization_only(std::size_t num_scenarios) {
  return from_rows(ConstraintRows(num_scenarios));
}

double LinearConstraintSet::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  if (F.rows() > 0) worst = std::max(worst, (F * x - f).cwiseMax(0.0).maxCoeff());
  if (H.rows() > 0) worst = std::max(worst, (H * x - h).cwiseAbs().maxCoeff());
  return worst;
}

ConstraintRows compile_mean_location(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::MeanLocation, InvalidArgument, "not a MeanLocation view");
  validate(view);
  require_same_scenarios(panel, prior);
  const Eigen::VectorXd v = view_column(view, panel);
  const double target = resolve_location(view, v, prior, weighted_mean(v, prior));
  ConstraintRows rows(panel.num_scenarios());
  rows.add(v, view.direction, target, describe(view));
  return rows;
}

ConstraintRows compile_median_location(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::MedianLocation, InvalidArgument, "not a MedianLocation view");
  validate(view);
  require_same_scenarios(panel, prior);
  const Eigen::VectorXd v = view_column(view, panel);
  const double t = resolve_location(view, v, prior, weighted_median(v, prior));
  ConstraintRows rows(panel.num_scenarios());
  // median >= t  <=>  mass strictly below t is at most 1/2 (and symmetrically).
  if (view.direction == Direction::LessEqual) {
    const Eigen::VectorXd above = indicator(v, [t](double x) { return x > t; });
    require_nonempty(above, view, "median threshold");
    rows.add(above, Direction::LessEqual, 0.5, describe(view));
  } else {
    const Eigen::VectorXd below = indicator(v, [t](double x) { return x < t; });
    require_nonempty(below, view, "median threshold");
    rows.add(below, view.direction == Direction::Equal ? Direction::Equal : Direction::LessEqual, 0.5,
             describe(view));
  }
  return rows;
}

ConstraintRows compile_ranking(const View& view, const ViewPanel& panel) {
  EPOOL_REQUIRE(view.kind == ViewKind::Ranking, InvalidArgument, "not a Ranking view");
  validate(view);
  ConstraintRows rows(panel.num_scenarios());
  for (std::size_t i = 0; i + 1 < view.columns.size(); ++i) {
    const Eigen::VectorXd diff = view_column(view, panel, i) - view_column(view, panel, i + 1);
    rows.add(diff, view.direction, 0.0, describe(view) + " #" + std::to_string(i + 1));
  }
  return rows;
}

ConstraintRows compile_volatility_std(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::VolatilityStd, InvalidArgument, "not a VolatilityStd view");
  validate(view);
  require_same_scenarios(panel, prior);
  const Eigen::VectorXd v = view_column(view, panel);
  const double m = weighted_mean(v, prior);
  const auto& target = require_target(view);
  double sigma = 0.0;
  switch (target.mode) {
    case TargetMode::Absolute:
      sigma = target.value;
      break;
    case TargetMode::ReferenceMultiple:
      sigma = target.value * dispersion(v, prior, target.dispersion);
      break;
    default:
      throw InvalidArgument(describe(view) + ": volatility target must be Absolute or ReferenceMultiple");
  }
  EPOOL_REQUIRE(sigma >= 0.0, InvalidArgument, describe(view) + ": target volatility is negative");
  ConstraintRows rows(panel.num_scenarios());
  rows.add(v.array().square().matrix(), view.direction, m * m + sigma * sigma, describe(view));
  return rows;
}

ConstraintRows compile_volatility_quantile_range(const View& view, const ViewPanel& panel,
                                                 const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::VolatilityQuantileRange, InvalidArgument,
                "not a VolatilityQuantileRange view");
  validate(view);
  require_same_scenarios(panel, prior);
  const auto& target = require_target(view);
  EPOOL_REQUIRE(target.mode == TargetMode::ReferenceMultiple, InvalidArgument,
                describe(view) + ": range target must be a ReferenceMultiple kappa");
  const double gamma = *view.gamma;
  const double shift = target.value * gamma;
  EPOOL_REQUIRE(shift > 0.0 && shift < 0.5, InvalidArgument,
                describe(view) + ": kappa * gamma must lie in (0, 1/2) or the tiles collapse");
  const Eigen::VectorXd v = view_column(view, panel);
  const double lower = weighted_quantile(v, prior, 0.5 - shift);
  const double upper = weighted_quantile(v, prior, 0.5 + shift);
  const Eigen::VectorXd below = indicator(v, [lower](double x) { return x < lower; });
  const Eigen::VectorXd above = indicator(v, [upper](double x) { return x > upper; });
  require_nonempty(below, view, "lower tile");
  require_nonempty(above, view, "upper tile");
  ConstraintRows rows(panel.num_scenarios());
  rows.add(below, view.direction, 0.5 - gamma, describe(view) + " lower");
  rows.add(above, view.direction, 0.5 - gamma, describe(view) + " upper");
  return rows;
}

Eigen::MatrixXd shrinkage_target(const Eigen::MatrixXd& reference_correlation, const Eigen::Vector3d& rho) {
  EPOOL_REQUIRE((rho.array() >= 0.0).all() && (rho.array() <= 1.0).all(), InvalidArgument,
                "shrinkage weights must lie in [0,1]");
  EPOOL_REQUIRE(std::abs(rho.sum() - 1.0) <= 1e-12, InvalidArgument, "shrinkage weights must sum to 1");
  EPOOL_REQUIRE(reference_correlation.rows() == reference_correlation.cols(), InvalidArgument,
                "correlation matrix must be square");
  const auto n = reference_correlation.rows();
  return rho[0] * Eigen::MatrixXd::Identity(n, n) + rho[1] * reference_correlation +
         rho[2] * Eigen::MatrixXd::Ones(n, n);
}

ConstraintRows compile_correlation_stress(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::CorrelationStress, InvalidArgument, "not a CorrelationStress view");
  validate(view);
  require_same_scenarios(panel, prior);
  const Eigen::VectorXd vk = view_column(view, panel, 0);
  const Eigen::VectorXd vl = view_column(view, panel, 1);
  const double mk = weighted_mean(vk, prior);
  const double ml = weighted_mean(vl, prior);
  const double sk = weighted_std(vk, prior);
  const double sl = weighted_std(vl, prior);
  EPOOL_REQUIRE(sk > 0.0 && sl > 0.0, DegenerateData, describe(view) + ": zero prior standard deviation");
  double target = 0.0;
  if (view.target) {
    target = view.target->value;
  } else {
    Eigen::Matrix2d c;
    const double rho = weighted_correlation(vk, vl, prior);
    c << 1.0, rho, rho, 1.0;
    target = shrinkage_target(c, *view.shrinkage)(0, 1);
  }
  ConstraintRows rows(panel.num_scenarios());
  rows.add(vk.cwiseProduct(vl), view.direction, mk * ml + sk * sl * target, describe(view));
  if (view.anchor) {
    rows.add(vk, Direction::Equal, mk, describe(view) + " anchor mean 1");
    rows.add(vl, Direction::Equal, ml, describe(view) + " anchor mean 2");
    rows.add(vk.array().square().matrix(), Direction::Equal, mk * mk + sk * sk, describe(view) + " anchor second 1");
    rows.add(vl.array().square().matrix(), Direction::Equal, ml * ml + sl * sl, describe(view) + " anchor second 2");
  }
  return rows;
}

ConstraintRows compile_quantile_tail(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::QuantileTail, InvalidArgument, "not a QuantileTail view");
  validate(view);
  require_same_scenarios(panel, prior);
  const double u = view.thresholds.front();
  EPOOL_REQUIRE(u > 0.0 && u < 1.0, InvalidArgument, describe(view) + ": tail level must lie in (0,1)");
  const Eigen::VectorXd v = view_column(view, panel);
  double t = 0.0;
  if (!view.target) {
    t = weighted_quantile(v, prior, u);
  } else if (view.target->mode == TargetMode::Absolute) {
    t = view.target->value;
  } else {
    throw InvalidArgument(describe(view) + ": quantile reference must be Absolute or omitted");
  }
  const Eigen::VectorXd below = indicator(v, [t](double x) { return x < t; });
  require_nonempty(below, view, "quantile threshold");
  // Q(u) >= t  <=>  P(V < t) <= u, so the direction flips.
  const Direction d = view.direction == Direction::Equal       ? Direction::Equal
                      : view.direction == Direction::GreaterEqual ? Direction::LessEqual
                                                                  : Direction::GreaterEqual;
  ConstraintRows rows(panel.num_scenarios());
  rows.add(below, d, u, describe(view));
  return rows;
}

ConstraintRows compile_tail_codependence(const View& view, const ViewPanel& panel, const ProbabilityVector& prior) {
  EPOOL_REQUIRE(view.kind == ViewKind::TailCodependence, InvalidArgument, "not a TailCodependence view");
  validate(view);
  require_same_scenarios(panel, prior);
  const auto J = static_cast<Eigen::Index>(panel.num_scenarios());
  Eigen::VectorXd joint = Eigen::VectorXd::Ones(J);
  for (std::size_t k = 0; k < view.columns.size(); ++k) {
    const double u = view.thresholds[k];
    EPOOL_REQUIRE(u > 0.0 && u <= 1.0, InvalidArgument, describe(view) + ": copula thresholds must lie in (0,1]");
    const Eigen::VectorXd ranks = empirical_copula_ranks(view_column(view, panel, k));
    for (Eigen::Index j = 0; j < J; ++j) {
      if (ranks[j] > u) joint[j] = 0.0;
    }
  }
  require_nonempty(joint, view, "joint copula threshold");
  const auto& target = require_target(view);
  double rhs = 0.0;
  switch (target.mode) {
    case TargetMode::Absolute:
      rhs = target.value;
      break;
    case TargetMode::ReferenceMultiple:
      rhs = target.value * prior.weights().dot(joint);
      break;
    default:
      throw InvalidArgument(describe(view) + ": codependence target must be Absolute or ReferenceMultiple");
  }
  ConstraintRows rows(panel.num_scenarios());
  rows.add(joint, view.direction, rhs, describe(view));
  return rows;
}

std::vector<std::vector<std::size_t>> monomials_up_to(std::size_t num_columns, int order) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  for (int d = 1; d <= order; ++d) collect_monomials(num_columns, static_cast<std::size_t>(d), 0, current, out, false);
  return out;
}

std::size_t moment_row_count(ViewKind kind, std::size_t num_columns, int order) {
  EPOOL_REQUIRE(order >= 1, InvalidArgument, "moment order must be at least 1");
  const auto m = static_cast<std::size_t>(order);
  switch (kind) {
    case ViewKind::MarginalMoments:
      return num_columns * m;
    case ViewKind::JointMoments:
      return binomial(num_columns + m, m) - 1;
    case ViewKind::CopulaMoments: {
      std::size_t count = num_columns * m;
      for (std::size_t d = 2; d <= std::min(m, num_columns); ++d) count += binomial(num_columns, d);
      return count;
    }
    default:
      throw InvalidArgument("not a moment-matching kind");
  }
}

ConstraintRows compile_moment_matching(const View& view, const ViewPanel& panel, const ProbabilityVector& prior,
                                       const CompileOptions& options) {
  EPOOL_REQUIRE(view.kind == ViewKind::MarginalMoments || view.kind == ViewKind::CopulaMoments ||
                    view.kind == ViewKind::JointMoments,
                InvalidArgument, "not a moment-matching view");
  validate(view);
  require_same_scenarios(panel, prior);
  const std::size_t K = view.columns.size();
  const std::size_t count = moment_row_count(view.kind, K, view.order);
  EPOOL_REQUIRE(count <= options.max_moment_rows, InvalidArgument,
                describe(view) + " would produce " + std::to_string(count) + " rows, above the cap of " +
                    std::to_string(options.max_moment_rows));

  const auto J = static_cast<Eigen::Index>(panel.num_scenarios());
  Eigen::MatrixXd working(J, static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::VectorXd v = view_column(view, panel, k);
    working.col(static_cast<Eigen::Index>(k)) =
        view.kind == ViewKind::CopulaMoments ? empirical_copula_ranks(v) : v;
  }
  const Eigen::MatrixXd& sample = *view.target_sample;
  const Eigen::VectorXd sample_weights =
      sample.rows() == J ? prior.weights()
                         : Eigen::VectorXd::Constant(sample.rows(), 1.0 / static_cast<double>(sample.rows()));

  ConstraintRows rows(panel.num_scenarios());
  auto match = [&](const std::vector<std::size_t>& index) {
    rows.add(monomial_column(working, index), Direction::Equal, sample_weights.dot(monomial_column(sample, index)),
             monomial_label(view, index));
  };

  switch (view.kind) {
    case ViewKind::MarginalMoments:
      for (std::size_t k = 0; k < K; ++k) {
        for (int m = 1; m <= view.order; ++m) match(std::vector<std::size_t>(static_cast<std::size_t>(m), k));
      }
      break;
    case ViewKind::JointMoments:
      for (const auto& index : monomials_up_to(K, view.order)) match(index);
      break;
    case ViewKind::CopulaMoments: {
      for (std::size_t k = 0; k < K; ++k) {
        for (int m = 1; m <= view.order; ++m) {
          const std::vector<std::size_t> index(static_cast<std::size_t>(m), k);
          rows.add(monomial_column(working, index), Direction::Equal, 1.0 / (m + 1.0), monomial_label(view, index));
        }
      }
      std::vector<std::size_t> current;
      std::vector<std::vector<std::size_t>> cross;
      for (std::size_t d = 2; d <= std::min(static_cast<std::size_t>(view.order), K); ++d) {
        collect_monomials(K, d, 0, current, cross, true);
      }
      for (const auto& index : cross) match(index);
      break;
    }
    default:
      break;
  }
  return rows;
}

ConstraintRows compile_view(const View& view, const ViewPanel& panel, const ProbabilityVector& prior,
                            const CompileOptions& options) {
  switch (view.kind) {
    case ViewKind::MeanLocation: return compile_mean_location(view, panel, prior);
    case ViewKind::MedianLocation: return compile_median_location(view, panel, prior);
    case ViewKind::Ranking: return compile_ranking(view, panel);
    case ViewKind::VolatilityStd: return compile_volatility_std(view, panel, prior);
    case ViewKind::VolatilityQuantileRange: return compile_volatility_quantile_range(view, panel, prior);
    case ViewKind::CorrelationStress: return compile_correlation_stress(view, panel, prior);
    case ViewKind::QuantileTail: return compile_quantile_tail(view, panel, prior);
    case ViewKind::TailCodependence: return compile_tail_codependence(view, panel, prior);
    case ViewKind::MarginalMoments:
    case ViewKind::CopulaMoments:
    case ViewKind::JointMoments: return compile_moment_matching(view, panel, prior, options);
  }
  throw InvalidArgument("unhandled view kind");
}

LinearConstraintSet compile(const std::vector<View>& views, const ViewPanel& panel, const ProbabilityVector& prior,
                            const CompileOptions& options) {
  require_same_scenarios(panel, prior);
  ConstraintRows rows(panel.num_scenarios());
  for (const auto& view : views) rows.append(compile_view(view, panel, prior, options));
  return LinearConstraintSet::from_rows(rows);
}

ViewPanel view_panel_for(const std::vector<View>& views, const ScenarioPanel& panel) {
  std::vector<std::string> expressions;
  for (const auto& view : views) {
    for (const auto& column : view.columns) {
      if (std::find(expressions.begin(), expressions.end(), column) == expressions.end()) {
        expressions.push_back(column);
      }
    }
  }
  return evaluate_view_columns(panel, expressions);
}

LinearConstraintSet compile(const std::vector<View>& views, const ScenarioPanel& panel,
                            const ProbabilityVector& prior, const CompileOptions& options) {
  return compile(views, view_panel_for(views, panel), prior, options);
}

}  // namespace epool
