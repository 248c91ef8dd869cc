#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epool/entropy_solver.hpp"
#include "epool/error.hpp"
#include "epool/statistics.hpp"
#include "epool/view_compiler.hpp"

using namespace epool;

namespace {

ViewPanel panel_from(std::vector<std::string> labels, const Eigen::MatrixXd& cols) {
  return ViewPanel{cols, std::move(labels)};
}

ViewPanel one_column(const Eigen::VectorXd& v) { return panel_from({"v"}, v); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

View make(ViewKind kind, std::vector<std::string> cols, Direction d, std::optional<TargetSpec> t = std::nullopt) {
  View v;
  v.kind = kind;
  v.columns = std::move(cols);
  v.direction = d;
  v.target = t;
  return v;
}

Eigen::MatrixXd normal_panel(Eigen::Index J, Eigen::Index K, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd out(J, K);
  for (Eigen::Index j = 0; j < J; ++j) {
    const double common = n(rng);
    for (Eigen::Index k = 0; k < K; ++k) out(j, k) = std::sqrt(rho) * common + std::sqrt(1.0 - rho) * n(rng);
  }
  return out;
}

// Row-wise check of (F, f, H, h) at x.
double worst(const LinearConstraintSet& c, const Eigen::VectorXd& x) { return c.max_violation(x); }

}  // namespace

TEST(Compile, EmptyViewsGiveNormalizationOnly) {
  const auto cs = compile({}, one_column(vec({1, 2, 3})), ProbabilityVector::uniform(3));
  EXPECT_EQ(cs.num_equalities(), 1u);
  EXPECT_EQ(cs.num_inequalities(), 0u);
  EXPECT_EQ(cs.H.row(0), Eigen::RowVectorXd::Ones(3));
  EXPECT_EQ(cs.h[0], 1.0);
}

TEST(Compile, MeanEqualityStructure) {
  const auto vp = one_column(vec({0, 1}));
  const auto cs = compile({make(ViewKind::MeanLocation, {"v"}, Direction::Equal, TargetSpec::absolute(0.7))}, vp,
                          ProbabilityVector::uniform(2));
  ASSERT_EQ(cs.num_equalities(), 2u);
  EXPECT_EQ(cs.H.row(1), vec({0, 1}).transpose());
  EXPECT_DOUBLE_EQ(cs.h[1], 0.7);
}

TEST(Compile, BearishSpreadKappaSigma) {
  const Eigen::MatrixXd cols = normal_panel(500, 1, 0.0, 1);
  const auto vp = one_column(cols.col(0));
  const auto prior = ProbabilityVector::uniform(500);
  const auto rows = compile_mean_location(
      make(ViewKind::MeanLocation, {"v"}, Direction::LessEqual, TargetSpec::kappa_sigma(-1.0)), vp, prior);
  ASSERT_EQ(rows.num_inequalities(), 1u);
  EXPECT_NEAR(rows.inequality_rhs()[0], weighted_mean(cols.col(0), prior) - weighted_std(cols.col(0), prior), 1e-15);
}

TEST(Compile, GreaterEqualRowsAreNegatedExactly) {
  const auto vp = one_column(vec({0.5, -1.25, 3.0}));
  const auto prior = ProbabilityVector::uniform(3);
  const auto ge = compile_mean_location(
      make(ViewKind::MeanLocation, {"v"}, Direction::GreaterEqual, TargetSpec::absolute(0.3)), vp, prior);
  const auto le = compile_mean_location(
      make(ViewKind::MeanLocation, {"v"}, Direction::LessEqual, TargetSpec::absolute(0.3)), vp, prior);
  EXPECT_EQ(ge.inequality_rows()[0], -le.inequality_rows()[0]);
  EXPECT_EQ(ge.inequality_rhs()[0], -le.inequality_rhs()[0]);
}

TEST(Compile, MedianGreaterEqualSelectsBelowThreshold) {
  const auto vp = one_column(vec({1, 2, 3, 4}));
  const auto rows = compile_median_location(
      make(ViewKind::MedianLocation, {"v"}, Direction::GreaterEqual, TargetSpec::absolute(3.0)), vp,
      ProbabilityVector::uniform(4));
  ASSERT_EQ(rows.num_inequalities(), 1u);
  EXPECT_EQ(rows.inequality_rows()[0], vec({1, 1, 0, 0}));
  EXPECT_EQ(rows.inequality_rhs()[0], 0.5);
}

TEST(Compile, MedianQuantileShiftResolvesToThirdQuintile) {
  Eigen::VectorXd v(10);
  for (int j = 0; j < 10; ++j) v[j] = 10.0 - j;  // values 10..1
  const auto prior = ProbabilityVector::uniform(10);
  const auto rows = compile_median_location(
      make(ViewKind::MedianLocation, {"v"}, Direction::GreaterEqual, TargetSpec::quantile_shift(0.5)), one_column(v),
      prior);
  const double t = weighted_quantile(v, prior, 0.6);
  EXPECT_EQ(t, 6.0);
  for (int j = 0; j < 10; ++j) EXPECT_EQ(rows.inequality_rows()[0][j], v[j] < t ? 1.0 : 0.0);
}

TEST(Compile, MedianThresholdBelowMinimumThrows) {
  EXPECT_THROW(compile_median_location(
                   make(ViewKind::MedianLocation, {"v"}, Direction::GreaterEqual, TargetSpec::absolute(-5.0)),
                   one_column(vec({1, 2, 3})), ProbabilityVector::uniform(3)),
               DegenerateData);
}

TEST(Compile, RankingRows) {
  Eigen::MatrixXd cols(4, 3);
  cols << 3, 2, 1, 4, 3, 0, 5, 1, 1, 6, 2, -1;
  const auto vp = panel_from({"a", "b", "c"}, cols);
  const auto prior = ProbabilityVector::uniform(4);
  const auto rows = compile_ranking(make(ViewKind::Ranking, {"a", "b", "c"}, Direction::GreaterEqual), vp);
  EXPECT_EQ(rows.num_inequalities(), 2u);
  const auto cs = compile({make(ViewKind::Ranking, {"a", "b", "c"}, Direction::GreaterEqual)}, vp, prior);
  EXPECT_LE(worst(cs, prior.weights()), 1e-12);
  EXPECT_THROW(compile_ranking(make(ViewKind::Ranking, {"a", "a"}, Direction::GreaterEqual), vp), DegenerateData);
  EXPECT_THROW(compile_ranking(make(ViewKind::Ranking, {"a"}, Direction::GreaterEqual), vp), InvalidArgument);
}

TEST(Compile, VolatilityStdRhs) {
  const Eigen::MatrixXd cols = normal_panel(300, 1, 0.0, 2);
  const auto vp = one_column(cols.col(0));
  const auto prior = ProbabilityVector::uniform(300);
  const double m = weighted_mean(cols.col(0), prior);
  const double s = weighted_std(cols.col(0), prior);
  const auto eq = compile_volatility_std(
      make(ViewKind::VolatilityStd, {"v"}, Direction::Equal, TargetSpec::reference_multiple(1.0)), vp, prior);
  EXPECT_NEAR(eq.equality_rhs()[0], m * m + s * s, 1e-15);
  EXPECT_NEAR(eq.equality_rows()[0].dot(prior.weights()), eq.equality_rhs()[0], 1e-12);
  const auto ge = compile_volatility_std(
      make(ViewKind::VolatilityStd, {"v"}, Direction::GreaterEqual, TargetSpec::reference_multiple(1.5)), vp, prior);
  EXPECT_NEAR(-ge.inequality_rhs()[0], m * m + 2.25 * s * s, 1e-15);
}

TEST(Compile, VolatilityStdSolvedScalesStd) {
  const Eigen::MatrixXd cols = normal_panel(10000, 1, 0.0, 3);
  const auto vp = one_column(cols.col(0));
  const auto prior = ProbabilityVector::uniform(10000);
  const double s = weighted_std(cols.col(0), prior);
  const auto cs = compile({make(ViewKind::MeanLocation, {"v"}, Direction::Equal, TargetSpec::kappa_sigma(0.0)),
                           make(ViewKind::VolatilityStd, {"v"}, Direction::Equal, TargetSpec::reference_multiple(1.5))},
                          vp, prior);
  const auto r = solve(cs, prior);
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_NEAR(weighted_std(cols.col(0), r.posterior) / (1.5 * s), 1.0, 0.01);
}

TEST(Compile, VolatilityQuantileRange) {
  Eigen::VectorXd v(100);
  for (int j = 0; j < 100; ++j) v[j] = static_cast<double>((j * 37) % 100);
  const auto prior = ProbabilityVector::uniform(100);
  View view = make(ViewKind::VolatilityQuantileRange, {"v"}, Direction::Equal, TargetSpec::reference_multiple(2.0));
  view.gamma = 0.1;
  const auto rows = compile_volatility_quantile_range(view, one_column(v), prior);
  ASSERT_EQ(rows.num_equalities(), 2u);
  EXPECT_DOUBLE_EQ(rows.equality_rhs()[0], 0.4);
  const double lo = weighted_quantile(v, prior, 0.3);
  const double hi = weighted_quantile(v, prior, 0.7);
  for (int j = 0; j < 100; ++j) {
    EXPECT_EQ(rows.equality_rows()[0][j], v[j] < lo ? 1.0 : 0.0);
    EXPECT_EQ(rows.equality_rows()[1][j], v[j] > hi ? 1.0 : 0.0);
  }
  view.target = TargetSpec::reference_multiple(1.0);
  const auto self = compile({view}, one_column(v), prior);
  EXPECT_LE(worst(self, prior.weights()), 1.0 / 100 + 1e-12);
  view.target = TargetSpec::reference_multiple(6.0);
  EXPECT_THROW(compile_volatility_quantile_range(view, one_column(v), prior), InvalidArgument);
}

TEST(Compile, CorrelationStressTargets) {
  const Eigen::MatrixXd cols = normal_panel(400, 2, 0.5, 4);
  const auto vp = panel_from({"a", "b"}, cols);
  const auto prior = ProbabilityVector::uniform(400);
  const double rho = weighted_correlation(cols.col(0), cols.col(1), prior);
  View self = make(ViewKind::CorrelationStress, {"a", "b"}, Direction::Equal, TargetSpec::absolute(rho));
  EXPECT_LE(worst(compile({self}, vp, prior), prior.weights()), 1e-12);

  View shrink = make(ViewKind::CorrelationStress, {"a", "b"}, Direction::Equal);
  shrink.shrinkage = Eigen::Vector3d(1.0, 0.0, 0.0);
  shrink.anchor = false;
  const auto rows = compile_correlation_stress(shrink, vp, prior);
  ASSERT_EQ(rows.num_equalities(), 1u);
  EXPECT_NEAR(rows.equality_rhs()[0], weighted_mean(cols.col(0), prior) * weighted_mean(cols.col(1), prior), 1e-15);
  shrink.shrinkage = Eigen::Vector3d(0.5, 0.6, 0.0);
  EXPECT_THROW(compile_correlation_stress(shrink, vp, prior), InvalidArgument);
}

TEST(Compile, CorrelationStressSolvedHitsTarget) {
  const Eigen::MatrixXd cols = normal_panel(10000, 2, 0.5, 5);
  const auto vp = panel_from({"a", "b"}, cols);
  const auto prior = ProbabilityVector::uniform(10000);
  const auto cs = compile({make(ViewKind::CorrelationStress, {"a", "b"}, Direction::Equal, TargetSpec::absolute(0.9))},
                          vp, prior);
  const auto r = solve(cs, prior);
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_NEAR(weighted_correlation(cols.col(0), cols.col(1), r.posterior), 0.9, 0.02);
}

TEST(Compile, QuantileTail) {
  Eigen::VectorXd v(200);
  for (int j = 0; j < 200; ++j) v[j] = std::cos(j * 1.7) * 10.0;
  const auto prior = ProbabilityVector::uniform(200);
  View view = make(ViewKind::QuantileTail, {"v"}, Direction::GreaterEqual, TargetSpec::absolute(-8.0));
  view.thresholds = {0.05};
  const auto rows = compile_quantile_tail(view, one_column(v), prior);
  ASSERT_EQ(rows.num_inequalities(), 1u);
  EXPECT_EQ(rows.inequality_rhs()[0], 0.05);
  for (int j = 0; j < 200; ++j) EXPECT_EQ(rows.inequality_rows()[0][j], v[j] < -8.0 ? 1.0 : 0.0);

  View self = make(ViewKind::QuantileTail, {"v"}, Direction::Equal);
  self.thresholds = {0.1};
  EXPECT_LE(worst(compile({self}, one_column(v), prior), prior.weights()), 1.0 / 200 + 1e-12);

  view.target = TargetSpec::absolute(-100.0);
  EXPECT_THROW(compile_quantile_tail(view, one_column(v), prior), DegenerateData);
}

TEST(Compile, TailCodependence) {
  const Eigen::MatrixXd cols = normal_panel(10000, 2, 0.0, 6);
  const auto vp = panel_from({"a", "b"}, cols);
  const auto prior = ProbabilityVector::uniform(10000);
  View view = make(ViewKind::TailCodependence, {"a", "b"}, Direction::Equal, TargetSpec::reference_multiple(1.0));
  view.thresholds = {0.1, 0.1};
  const auto self = compile({view}, vp, prior);
  EXPECT_LE(worst(self, prior.weights()), 1e-12);
  const double prior_mass = self.H.row(1).dot(prior.weights());
  EXPECT_NEAR(prior_mass, 0.01, 0.003);

  view.target = TargetSpec::reference_multiple(2.0);
  const auto doubled = compile({view}, vp, prior);
  const auto r = solve(doubled, prior);
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_NEAR(doubled.H.row(1).dot(r.posterior.weights()), 0.02, 0.005);

  view.thresholds = {1.0, 1.0};
  view.target = TargetSpec::absolute(0.5);
  const auto all = compile({view}, vp, prior);
  EXPECT_EQ(solve(all, prior).status, SolveStatus::Infeasible);
}

TEST(Compile, MarginalMomentsSelfMatch) {
  const Eigen::MatrixXd cols = normal_panel(100, 1, 0.0, 7);
  const auto prior = ProbabilityVector::uniform(100);
  View view = make(ViewKind::MarginalMoments, {"v"}, Direction::Equal);
  view.order = 1;
  view.target_sample = cols;
  const auto cs = compile({view}, one_column(cols.col(0)), prior);
  EXPECT_EQ(cs.num_equalities(), 2u);
  EXPECT_LE(worst(cs, prior.weights()), 1e-12);
}

TEST(Compile, CopulaMomentsRows) {
  const Eigen::MatrixXd cols = normal_panel(50, 2, 0.3, 8);
  View view = make(ViewKind::CopulaMoments, {"a", "b"}, Direction::Equal);
  view.order = 2;
  view.target_sample = Eigen::MatrixXd::Constant(4, 2, 0.5);
  const auto rows = compile_moment_matching(view, panel_from({"a", "b"}, cols), ProbabilityVector::uniform(50));
  ASSERT_EQ(rows.num_equalities(), 5u);
  EXPECT_EQ(rows.equality_rhs()[0], 0.5);
  EXPECT_DOUBLE_EQ(rows.equality_rhs()[1], 1.0 / 3.0);
  EXPECT_EQ(rows.equality_rhs()[2], 0.5);
  EXPECT_DOUBLE_EQ(rows.equality_rhs()[3], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(rows.equality_rhs()[4], 0.25);
}

TEST(Compile, JointMomentsCountAndCap) {
  const Eigen::MatrixXd cols = normal_panel(60, 3, 0.2, 9);
  View view = make(ViewKind::JointMoments, {"a", "b", "c"}, Direction::Equal);
  view.order = 3;
  view.target_sample = cols;
  const auto rows =
      compile_moment_matching(view, panel_from({"a", "b", "c"}, cols), ProbabilityVector::uniform(60));
  EXPECT_EQ(rows.num_equalities(), 19u);
  CompileOptions tight;
  tight.max_moment_rows = 10;
  EXPECT_THROW(compile_moment_matching(view, panel_from({"a", "b", "c"}, cols), ProbabilityVector::uniform(60), tight),
               InvalidArgument);
}

TEST(Compile, RowCountFormulaMatchesEnumeration) {
  for (std::size_t K = 1; K <= 5; ++K) {
    for (int m = 1; m <= 4; ++m) {
      // Brute-force count of exponent vectors with total degree 1..m.
      std::size_t joint = 0;
      std::size_t cross = 0;
      const std::size_t states = static_cast<std::size_t>(std::pow(m + 1, K));
      for (std::size_t code = 0; code < states; ++code) {
        std::size_t c = code;
        int degree = 0;
        bool square_free = true;
        for (std::size_t k = 0; k < K; ++k) {
          const int e = static_cast<int>(c % static_cast<std::size_t>(m + 1));
          c /= static_cast<std::size_t>(m + 1);
          degree += e;
          if (e > 1) square_free = false;
        }
        if (degree >= 1 && degree <= m) ++joint;
        if (degree >= 2 && degree <= m && square_free) ++cross;
      }
      EXPECT_EQ(moment_row_count(ViewKind::JointMoments, K, m), joint);
      EXPECT_EQ(monomials_up_to(K, m).size(), joint);
      EXPECT_EQ(moment_row_count(ViewKind::MarginalMoments, K, m), K * static_cast<std::size_t>(m));
      EXPECT_EQ(moment_row_count(ViewKind::CopulaMoments, K, m), K * static_cast<std::size_t>(m) + cross);
    }
  }
}

TEST(Compile, DeterministicAndPriorConsistent) {
  const Eigen::MatrixXd cols = normal_panel(1000, 2, 0.4, 10);
  const auto vp = panel_from({"a", "b"}, cols);
  const auto prior = ProbabilityVector::uniform(1000);
  View median = make(ViewKind::MedianLocation, {"a"}, Direction::Equal, TargetSpec::kappa_sigma(0.0));
  View tail = make(ViewKind::QuantileTail, {"b"}, Direction::Equal);
  tail.thresholds = {0.2};
  const std::vector<View> views{
      make(ViewKind::MeanLocation, {"a"}, Direction::Equal, TargetSpec::kappa_sigma(0.0)),
      make(ViewKind::VolatilityStd, {"b"}, Direction::Equal, TargetSpec::reference_multiple(1.0)),
      make(ViewKind::CorrelationStress, {"a", "b"}, Direction::Equal,
           TargetSpec::absolute(weighted_correlation(cols.col(0), cols.col(1), prior))),
      median, tail};
  const auto c1 = compile(views, vp, prior);
  const auto c2 = compile(views, vp, prior);
  EXPECT_EQ(c1.H, c2.H);
  EXPECT_EQ(c1.h, c2.h);
  EXPECT_EQ(c1.F, c2.F);
  EXPECT_LE(worst(c1, prior.weights()), 1.0 / 1000 + 1e-12);
  // Rows from the smooth kinds hold to rounding.
  const auto smooth = compile({views[0], views[1], views[2]}, vp, prior);
  EXPECT_LE(worst(smooth, prior.weights()), 1e-9);
}
