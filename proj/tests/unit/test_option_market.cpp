#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epool/bootstrap.hpp"
#include "epool/error.hpp"
#include "epool/frontier.hpp"
#include "epool/option_pricing.hpp"
#include "oracles.hpp"

using namespace epool;

namespace {

ButterflyContract atm_contract() {
  ButterflyContract c;
  c.id = "X_2m";
  c.underlying_id = "X";
  c.underlying_factor = "X";
  c.vol_factor = "X_2m";
  c.strike = 100.0;
  c.expiry = 2.0 / 12.0;
  c.risk_free = 0.01;
  c.smile_alpha = -0.1;
  c.smile_beta = 0.05;
  c.current_underlying = 100.0;
  c.current_atm_vol = 0.3;
  c.horizon = 1.0 / 252.0;
  return c;
}

}  // namespace

TEST(BlackScholes, AtTheMoneyReference) {
  EXPECT_NEAR(bs_price(100, 0.2, 100, 1, 0), 15.9311, 1e-3);
  EXPECT_NEAR(bs_price(100, 0.2, 100, 1, 0), oracle::call(100, 0.2, 100, 1, 0) + oracle::put(100, 0.2, 100, 1, 0),
              1e-10);
}

TEST(BlackScholes, MatchesCallPlusPutOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> y(20, 200), s(0.05, 0.9), k(20, 200), t(0.01, 3.0), r(-0.01, 0.08);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = y(rng), b = s(rng), c = k(rng), d = t(rng), e = r(rng);
    EXPECT_NEAR(bs_price(a, b, c, d, e), oracle::call(a, b, c, d, e) + oracle::put(a, b, c, d, e), 1e-10);
    EXPECT_NEAR(bs_call(a, b, c, d, e), oracle::call(a, b, c, d, e), 1e-10);
    EXPECT_NEAR(bs_put(a, b, c, d, e), oracle::put(a, b, c, d, e), 1e-10);
  }
}

TEST(BlackScholes, VanishingVolatility) {
  for (double y : {80.0, 100.0, 125.0}) EXPECT_NEAR(bs_price(y, 1e-8, 100, 1, 0), std::abs(y - 100.0), 1e-6);
}

TEST(BlackScholes, IncreasingInVolatility) {
  double last = 0.0;
  for (double s = 0.01; s < 2.0; s += 0.01) {
    const double v = bs_price(90, s, 100, 0.5, 0.02);
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(BlackScholes, RejectsNonPositiveInputs) {
  EXPECT_THROW(bs_price(0, 0.2, 100, 1, 0), InvalidArgument);
  EXPECT_THROW(bs_price(100, 0.0, 100, 1, 0), InvalidArgument);
  EXPECT_THROW(bs_price(100, 0.2, -1, 1, 0), InvalidArgument);
  EXPECT_THROW(bs_price(100, 0.2, 100, 0, 0), InvalidArgument);
}

TEST(Smile, Examples) {
  EXPECT_EQ(smile_vol(100, 0.3, 100, 0.5, -0.1, 0.05), 0.3);
  EXPECT_EQ(smile_vol(120, 0.3, 100, 0.5, 0.0, 0.0), 0.3);
  const double m = std::log(1.2) / std::sqrt(0.5);
  EXPECT_NEAR(smile_vol(120, 0.3, 100, 0.5, -0.1, 0.05), 0.3 - 0.1 * m + 0.05 * m * m, 1e-15);
  for (double y = 50; y < 200; y += 1.0) {
    EXPECT_GE(smile_vol(y, 0.3, 100, 0.5, 0.0, 0.05), smile_vol(100, 0.3, 100, 0.5, 0.0, 0.05));
  }
  EXPECT_LT(smile_vol(300, 0.05, 100, 0.01, -0.5, 0.0), 0.0);
  EXPECT_THROW(smile_vol(100, 0.3, 100, 0.0, 0.0, 0.0), InvalidArgument);
}

TEST(HorizonPrice, NullScenarioIsBsAtRemainingMaturity) {
  const auto c = atm_contract();
  EXPECT_NEAR(horizon_price(c, 0.0, 0.0), bs_price(100, 0.3, 100, c.expiry - c.horizon, c.risk_free), 1e-12);
}

TEST(HorizonPrice, ComposesSmileAndShift) {
  const auto c = atm_contract();
  const double y = 100 * std::exp(0.03);
  const double t = c.expiry - c.horizon;
  const double h = smile_vol(y, 0.3 + 0.01, 100, t, c.smile_alpha, c.smile_beta);
  EXPECT_NEAR(horizon_price(c, 0.03, 0.01), oracle::call(y, h, 100, t, c.risk_free) + oracle::put(y, h, 100, t, c.risk_free),
              1e-10);
}

TEST(HorizonPrice, VanishingHorizonRecoversCurrentPrice) {
  auto c = atm_contract();
  c.horizon = 1e-14;
  EXPECT_NEAR(horizon_price(c, 0.0, 0.0), current_price(c), 1e-9);
  EXPECT_NEAR(current_price(c), bs_price(100, 0.3, 100, c.expiry, c.risk_free), 1e-12);
}

TEST(HorizonPrice, StraddleConvexity) {
  auto c = atm_contract();
  c.risk_free = 0.0;
  c.smile_alpha = 0.0;
  c.smile_beta = 0.0;
  // With r = 0 the straddle is smallest where d1 = 0, at log-moneyness -sigma^2 T / 2.
  const double t = c.expiry - c.horizon;
  const double centre = -0.5 * 0.3 * 0.3 * t;
  const double bottom = horizon_price(c, centre, 0.0);
  EXPECT_LT(bottom, horizon_price(c, centre + 1e-3, 0.0));
  EXPECT_LT(bottom, horizon_price(c, centre - 1e-3, 0.0));
  double last_up = bottom;
  double last_down = bottom;
  for (double x = 0.005; x < 0.2; x += 0.005) {
    const double up = horizon_price(c, centre + x, 0.0);
    const double down = horizon_price(c, centre - x, 0.0);
    EXPECT_GT(up, last_up);
    EXPECT_GT(down, last_down);
    last_up = up;
    last_down = down;
    EXPECT_GT(horizon_price(c, x + 1e-3, 0.0) + horizon_price(c, x - 1e-3, 0.0) - 2 * horizon_price(c, x, 0.0), 0.0);
  }
}

TEST(HorizonPrice, NonPositiveSmileVolThrows) {
  auto c = atm_contract();
  EXPECT_THROW(horizon_price(c, 0.0, -0.31), DegenerateData);
  c.expiry = c.horizon;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(HorizonDelta, MatchesFiniteDifferenceAndSign) {
  const auto c = atm_contract();
  const double h = 1e-5;
  const double fd = (horizon_price(c, h, 0) - horizon_price(c, -h, 0)) / (2 * h);
  EXPECT_NEAR(horizon_delta(c), fd, 1e-4);
  auto itm = c;
  itm.strike = 80.0;
  EXPECT_GT(horizon_delta(itm), 0.0);
  auto otm = c;
  otm.strike = 120.0;
  EXPECT_LT(horizon_delta(otm), 0.0);
}

TEST(Bootstrap, CountsPerRow) {
  const CaseStudyMarket market;
  const auto history = market.synthetic_history(700, 3);
  ASSERT_EQ(history.num_factors(), 14u);
  BootstrapConfig config;
  config.num_scenarios = 100000;
  config.seed = 9;
  config.epsilon = 1e-300;
  const auto [panel, p] = kernel_bootstrap(history, config);
  ASSERT_EQ(panel.num_scenarios(), 100000u);
  EXPECT_EQ(p.weights(), ProbabilityVector::uniform(100000).weights());
  // Zero bandwidth: every draw equals its parent row, so the blocks can be counted.
  std::size_t j = 0;
  for (Eigen::Index t = 0; t < 700; ++t) {
    std::size_t count = 0;
    while (j < panel.num_scenarios() && panel.data().row(static_cast<Eigen::Index>(j)).isApprox(history.data().row(t), 1e-12)) {
      ++count;
      ++j;
    }
    EXPECT_EQ(count, t < 100000 % 700 ? 143u : 142u) << "row " << t;
  }
  EXPECT_EQ(j, 100000u);
}

TEST(Bootstrap, MeanWithinClt) {
  const CaseStudyMarket market;
  const auto history = market.synthetic_history(700, 4);
  BootstrapConfig config;
  config.num_scenarios = 20000;
  config.seed = 5;
  const auto [panel, p] = kernel_bootstrap(history, config);
  const Eigen::VectorXd hm = history.data().colwise().mean();
  const Eigen::VectorXd bm = panel.data().colwise().mean();
  const Eigen::MatrixXd cov = sample_covariance(history.data());
  for (Eigen::Index k = 0; k < 14; ++k) {
    const double sd = std::sqrt(config.epsilon * cov(k, k));
    EXPECT_LE(std::abs(bm[k] - hm[k]), 4.0 * sd / std::sqrt(20000.0)) << history.factor_names()[k];
  }
  const auto again = kernel_bootstrap(history, config);
  EXPECT_EQ(again.first.data(), panel.data());
  EXPECT_EQ(panel.factor_names(), history.factor_names());
}

TEST(Bootstrap, Errors) {
  const CaseStudyMarket market;
  const auto history = market.synthetic_history(10, 1);
  BootstrapConfig config;
  config.num_scenarios = 1000;
  EXPECT_THROW(kernel_bootstrap(history, config), DegenerateData);
  const auto ok = market.synthetic_history(100, 1);
  config.num_scenarios = 50;
  EXPECT_THROW(kernel_bootstrap(ok, config), InvalidArgument);
  config.num_scenarios = 1000;
  config.epsilon = 0.0;
  EXPECT_THROW(kernel_bootstrap(ok, config), InvalidArgument);
}

TEST(SampleCovariance, UnbiasedNormalization) {
  Eigen::MatrixXd d(3, 2);
  d << 1, 2, 2, 4, 3, 9;
  const auto c = sample_covariance(d);
  EXPECT_DOUBLE_EQ(c(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c(0, 1), 3.5);
  EXPECT_DOUBLE_EQ(c(1, 1), 13.0);
}

TEST(CaseStudy, FactorsAndBook) {
  const CaseStudyMarket market;
  const auto names = market.factor_names();
  ASSERT_EQ(names.size(), 14u);
  EXPECT_EQ(names.front(), "M");
  EXPECT_EQ(names[1], "M_1m");
  EXPECT_EQ(names.back(), "X10y");
  const auto book = market.book();
  ASSERT_EQ(book.size(), 9u);
  for (const auto& c : book) {
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.strike, c.current_underlying);
  }
  const auto h1 = market.synthetic_history(700, 11);
  const auto h2 = market.synthetic_history(700, 11);
  EXPECT_EQ(h1.data(), h2.data());
  EXPECT_TRUE(h1.data().allFinite());
}

TEST(PnlPanel, ShapeThetaRowAndLinearity) {
  const CaseStudyMarket market;
  const auto book = market.book();
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(3, 14);
  data(1, 0) = 0.05;  // M up 5%
  data(2, 1) = 0.02;  // M 1m vol up two points
  const ScenarioPanel panel(market.factor_names(), data);
  const auto pnl = build_pnl_panel(panel, book);
  ASSERT_EQ(pnl.num_instruments(), 9u);
  ASSERT_EQ(pnl.num_scenarios(), 3u);
  for (std::size_t i = 0; i < book.size(); ++i) {
    const auto& c = book[i];
    const double theta = horizon_price(c, 0, 0) - current_price(c);
    EXPECT_NEAR(pnl.data(0, static_cast<Eigen::Index>(i)), theta, 1e-12);
    EXPECT_LT(theta, 0.0);
    EXPECT_EQ(pnl.instrument_ids[i], c.id);
  }
  EXPECT_GT(pnl.data(1, 0), pnl.data(0, 0));
  EXPECT_GT(pnl.data(2, 0), pnl.data(0, 0));
  EXPECT_EQ(pnl.data(2, 1), pnl.data(0, 1));
  EXPECT_TRUE(pnl.flagged_scenarios.empty());

  std::vector<double> prices;
  for (const auto& c : book) prices.push_back(current_price(c));
  EXPECT_EQ(build_pnl_panel(panel, book, prices).data, pnl.data);

  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(9, -1, 1);
  const Eigen::VectorXd once = pnl.data * w;
  const Eigen::VectorXd twice = pnl.data * (2.0 * w);
  EXPECT_LE((twice - 2.0 * once).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PnlPanel, FlagsNonPositiveSmileVol) {
  const CaseStudyMarket market;
  const auto book = market.book();
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(2, 14);
  data(1, 1) = -0.5;  // M 1m ATM vol below zero
  const auto pnl = build_pnl_panel(ScenarioPanel(market.factor_names(), data), book);
  ASSERT_EQ(pnl.flagged_scenarios.size(), 1u);
  EXPECT_EQ(pnl.flagged_scenarios[0], 1u);
  EXPECT_TRUE(pnl.data.allFinite());
}

TEST(PnlPanel, MissingFactorThrows) {
  const CaseStudyMarket market;
  const ScenarioPanel panel({"M", "M_1m"}, Eigen::MatrixXd::Zero(2, 2));
  EXPECT_THROW(build_pnl_panel(panel, market.book()), InvalidArgument);
}
