#include "epool/option_pricing.hpp"

#include <cmath>

#include "epool/error.hpp"

namespace epool {

namespace {

void require_positive_inputs(double y, double sigma, double K, double T) {
  EPOOL_REQUIRE(y > 0.0 && sigma > 0.0 && K > 0.0 && T > 0.0, InvalidArgument,
                "Black-Scholes inputs y, sigma, K, T must be positive");
}

struct D12 {
  double d1;
  double d2;
};

D12 d_terms(double y, double sigma, double K, double T, double r) {
  const double vol_sqrt_t = sigma * std::sqrt(T);
  const double d1 = (std::log(y / K) + (r + 0.5 * sigma * sigma) * T) / vol_sqrt_t;
  return {d1, d1 - vol_sqrt_t};
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bs_price(double y, double sigma, double K, double T, double r) {
  require_positive_inputs(y, sigma, K, T);
  const auto [d1, d2] = d_terms(y, sigma, K, T, r);
  return y * (normal_cdf(d1) - normal_cdf(-d1)) - K * std::exp(-r * T) * (normal_cdf(d2) - normal_cdf(-d2));
}

double bs_call(double y, double sigma, double K, double T, double r) {
  require_positive_inputs(y, sigma, K, T);
  const auto [d1, d2] = d_terms(y, sigma, K, T, r);
  return y * normal_cdf(d1) - K * std::exp(-r * T) * normal_cdf(d2);
}

double bs_put(double y, double sigma, double K, double T, double r) {
  require_positive_inputs(y, sigma, K, T);
  const auto [d1, d2] = d_terms(y, sigma, K, T, r);
  return K * std::exp(-r * T) * normal_cdf(-d2) - y * normal_cdf(-d1);
}

double smile_vol(double y, double sigma, double K, double T, double alpha, double beta) {
  EPOOL_REQUIRE(T > 0.0, InvalidArgument, "smile map needs positive time to expiry");
  EPOOL_REQUIRE(y > 0.0 && K > 0.0, InvalidArgument, "smile map needs positive underlying and strike");
  const double m = std::log(y / K) / std::sqrt(T);
  return sigma + alpha * m + beta * m * m;
}

void ButterflyContract::validate() const {
  EPOOL_REQUIRE(strike > 0.0 && current_underlying > 0.0 && expiry > 0.0 && current_atm_vol > 0.0, InvalidArgument,
                "contract '" + id + "': strike, underlying, expiry and vol must be positive");
  EPOOL_REQUIRE(horizon >= 0.0 && expiry - horizon > 0.0, InvalidArgument,
                "contract '" + id + "': horizon must be shorter than the expiry");
  EPOOL_REQUIRE(!underlying_factor.empty() && !vol_factor.empty(), InvalidArgument,
                "contract '" + id + "': factor columns are required");
}

double horizon_price(const ButterflyContract& c, double underlying_log_change, double vol_change) {
  const double remaining = c.expiry - c.horizon;
  const double y = c.current_underlying * std::exp(underlying_log_change);
  const double vol = smile_vol(y, c.current_atm_vol + vol_change, c.strike, remaining, c.smile_alpha, c.smile_beta);
  EPOOL_REQUIRE(vol > 0.0, DegenerateData, "contract '" + c.id + "': smile-adjusted volatility is not positive");
  return bs_price(y, vol, c.strike, remaining, c.risk_free);
}

double current_price(const ButterflyContract& c) {
  const double vol =
      smile_vol(c.current_underlying, c.current_atm_vol, c.strike, c.expiry, c.smile_alpha, c.smile_beta);
  EPOOL_REQUIRE(vol > 0.0, DegenerateData, "contract '" + c.id + "': smile-adjusted volatility is not positive");
  return bs_price(c.current_underlying, vol, c.strike, c.expiry, c.risk_free);
}

double horizon_delta(const ButterflyContract& c, double bump) {
  return (horizon_price(c, bump, 0.0) - horizon_price(c, -bump, 0.0)) / (2.0 * bump);
}

}  // namespace epool
