#pragma once

#include <string>

namespace epool {

double normal_cdf(double x);

/// Black-Scholes value of a call plus a put at the same strike:
/// y [Phi(d1) - Phi(-d1)] - K e^{-rT} [Phi(d2) - Phi(-d2)].
double bs_price(double underlying, double volatility, double strike, double expiry, double rate);

double bs_call(double underlying, double volatility, double strike, double expiry, double rate);
double bs_put(double underlying, double volatility, double strike, double expiry, double rate);

/// Skew/smile map sigma + alpha m + beta m^2 with m = ln(y/K) / sqrt(T).
/// Returns the raw adjusted volatility, which may be non-positive.
double smile_vol(double underlying, double atm_vol, double strike, double expiry, double alpha, double beta);

/// Long call + long put on one underlying, with the factor columns that drive it.
struct ButterflyContract {
  std::string id;
  std::string underlying_id;
  std::string underlying_factor;  ///< column holding ln(y_{t+tau} / y_t)
  std::string vol_factor;         ///< column holding the ATM implied-vol change (decimals)
  double strike = 0.0;
  double expiry = 0.0;
  double risk_free = 0.0;
  double smile_alpha = 0.0;
  double smile_beta = 0.0;
  double current_underlying = 0.0;
  double current_atm_vol = 0.0;
  double horizon = 0.0;

  void validate() const;
};

/// Price at the horizon after the underlying log-change and ATM-vol change:
/// BS(y e^{x_y}, h(y e^{x_y}, sigma + x_sigma, K, T - tau); K, T - tau, r).
/// Throws DegenerateData when the smile-adjusted volatility is not positive.
double horizon_price(const ButterflyContract& contract, double underlying_log_change, double vol_change);

/// Model price today: smile-adjusted BS at the full maturity T.
double current_price(const ButterflyContract& contract);

/// d(horizon price)/d(underlying log-change) at the null scenario, by central difference.
double horizon_delta(const ButterflyContract& contract, double bump = 1e-4);

}  // namespace epool
