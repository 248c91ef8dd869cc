#include "epool/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "epool/error.hpp"
#include "epool/quadratic_program.hpp"
#include "epool/statistics.hpp"

namespace epool {

namespace {

constexpr double kIntrinsicVol = 1e-12;

double scenario_price(const ButterflyContract& c, double x_y, double x_sigma, bool& flagged) {
  const double remaining = c.expiry - c.horizon;
  const double y = c.current_underlying * std::exp(x_y);
  double vol = smile_vol(y, c.current_atm_vol + x_sigma, c.strike, remaining, c.smile_alpha, c.smile_beta);
  if (!(vol > 0.0)) {
    flagged = true;
    vol = kIntrinsicVol;
  }
  return bs_price(y, vol, c.strike, remaining, c.risk_free);
}

}  // namespace

PricePanel build_pnl_panel(const ScenarioPanel& panel, const std::vector<ButterflyContract>& book,
                           const std::vector<double>& current_prices) {
  EPOOL_REQUIRE(!book.empty(), InvalidArgument, "book is empty");
  EPOOL_REQUIRE(current_prices.size() == book.size(), InvalidArgument,
                "one current price is required per contract");
  const auto J = static_cast<Eigen::Index>(panel.num_scenarios());
  PricePanel out;
  out.data.resize(J, static_cast<Eigen::Index>(book.size()));
  std::vector<bool> flagged(static_cast<std::size_t>(J), false);
  for (std::size_t i = 0; i < book.size(); ++i) {
    const auto& c = book[i];
    c.validate();
    EPOOL_REQUIRE(std::isfinite(current_prices[i]), InvalidArgument, "current price must be finite");
    EPOOL_REQUIRE(panel.has_factor(c.underlying_factor), InvalidArgument,
                  "panel has no column '" + c.underlying_factor + "' for contract " + c.id);
    EPOOL_REQUIRE(panel.has_factor(c.vol_factor), InvalidArgument,
                  "panel has no column '" + c.vol_factor + "' for contract " + c.id);
    const auto ky = static_cast<Eigen::Index>(panel.factor_index(c.underlying_factor));
    const auto ks = static_cast<Eigen::Index>(panel.factor_index(c.vol_factor));
    for (Eigen::Index j = 0; j < J; ++j) {
      bool bad = false;
      out.data(j, static_cast<Eigen::Index>(i)) =
          scenario_price(c, panel.data()(j, ky), panel.data()(j, ks), bad) - current_prices[i];
      if (bad) flagged[static_cast<std::size_t>(j)] = true;
    }
    out.instrument_ids.push_back(c.id);
  }
  for (std::size_t j = 0; j < flagged.size(); ++j)
    if (flagged[j]) out.flagged_scenarios.push_back(j);
  EPOOL_REQUIRE(out.data.allFinite(), DegenerateData, "p&l panel has non-finite entries");
  return out;
}

PricePanel build_pnl_panel(const ScenarioPanel& panel, const std::vector<ButterflyContract>& book) {
  std::vector<double> prices;
  prices.reserve(book.size());
  for (const auto& c : book) prices.push_back(current_price(c));
  return build_pnl_panel(panel, book, prices);
}

void LinearConstraints::add(const Eigen::RowVectorXd& row, double lo, double hi, std::string label) {
  EPOOL_REQUIRE(B.rows() == 0 || B.cols() == row.size(), InvalidArgument, "constraint row has the wrong width");
  EPOOL_REQUIRE(lo <= hi, InvalidArgument, "constraint lower bound exceeds upper bound");
  B.conservativeResize(B.rows() + 1, row.size());
  B.row(B.rows() - 1) = row;
  lower.conservativeResize(lower.size() + 1);
  lower[lower.size() - 1] = lo;
  upper.conservativeResize(upper.size() + 1);
  upper[upper.size() - 1] = hi;
  labels.push_back(std::move(label));
}

LinearConstraints zero_budget_zero_delta(const std::vector<ButterflyContract>& book,
                                         const std::vector<double>& current_prices) {
  EPOOL_REQUIRE(current_prices.size() == book.size(), InvalidArgument,
                "one current price is required per contract");
  const auto I = static_cast<Eigen::Index>(book.size());
  LinearConstraints out;
  Eigen::RowVectorXd budget(I);
  for (Eigen::Index i = 0; i < I; ++i) budget[i] = current_prices[static_cast<std::size_t>(i)];
  out.add(budget, 0.0, 0.0, "budget");

  std::map<std::string, Eigen::RowVectorXd> deltas;
  std::vector<std::string> order;
  for (Eigen::Index i = 0; i < I; ++i) {
    const auto& c = book[static_cast<std::size_t>(i)];
    auto [it, inserted] = deltas.try_emplace(c.underlying_id, Eigen::RowVectorXd::Zero(I));
    if (inserted) order.push_back(c.underlying_id);
    it->second[i] = horizon_delta(c);
  }
  for (const auto& name : order) out.add(deltas[name], 0.0, 0.0, "delta:" + name);
  return out;
}

void FrontierSpec::validate(std::size_t num_instruments) const {
  EPOOL_REQUIRE(gamma > 0.0 && gamma < 1.0, InvalidArgument, "CVaR level gamma must lie in (0,1)");
  EPOOL_REQUIRE(!lambdas.empty(), InvalidArgument, "at least one lambda is required");
  for (double l : lambdas) EPOOL_REQUIRE(l >= 0.0 && std::isfinite(l), InvalidArgument, "lambda must be >= 0");
  EPOOL_REQUIRE(static_cast<std::size_t>(position_bounds.size()) == num_instruments, InvalidArgument,
                "one position bound is required per instrument");
  EPOOL_REQUIRE((position_bounds.array() > 0.0).all() && position_bounds.allFinite(), InvalidArgument,
                "position bounds must be positive and finite");
  EPOOL_REQUIRE(constraints.rows() == 0 || static_cast<std::size_t>(constraints.B.cols()) == num_instruments,
                InvalidArgument, "constraint matrix width must equal the number of instruments");
  EPOOL_REQUIRE(num_variance_targets >= 1, InvalidArgument, "at least one variance target is required");
  for (Eigen::Index r = 0; r < constraints.rows(); ++r) {
    EPOOL_REQUIRE(constraints.lower[r] <= 1e-12 && constraints.upper[r] >= -1e-12, InvalidArgument,
                  "infeasible constraint set: w = 0 violates row '" +
                      constraints.labels[static_cast<std::size_t>(r)] + "'");
  }
}

namespace {

struct MeanVarianceProblem {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  QuadraticProgram qp;

  double variance(const Eigen::VectorXd& w) const { return std::max(0.0, w.dot(sigma * w)); }

  Eigen::VectorXd solve(double theta) {
    qp.c = -theta * mu;
    const auto r = solve_qp(qp, Eigen::VectorXd::Zero(mu.size()));
    EPOOL_REQUIRE(r.converged, Error, "mean-variance QP did not converge");
    return r.x;
  }
};

MeanVarianceProblem make_problem(const PricePanel& pnl, const ProbabilityVector& p, const FrontierSpec& spec) {
  const auto I = static_cast<Eigen::Index>(pnl.num_instruments());
  MeanVarianceProblem prob;
  const Eigen::VectorXd& w = p.weights();
  prob.mu = pnl.data.transpose() * w;
  const Eigen::MatrixXd centered = pnl.data.rowwise() - prob.mu.transpose();
  prob.sigma = centered.transpose() * w.asDiagonal() * centered;
  prob.sigma = 0.5 * (prob.sigma + prob.sigma.transpose());

  // A tiny ridge makes the QP strictly convex even for collinear instruments.
  const double ridge = 1e-10 * std::max(prob.sigma.diagonal().maxCoeff(), 1e-300);
  prob.qp.Q = 2.0 * prob.sigma + 2.0 * ridge * Eigen::MatrixXd::Identity(I, I);
  prob.qp.c = Eigen::VectorXd::Zero(I);

  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Eigen::RowVectorXd> in_rows;
  std::vector<double> in_rhs;
  const auto& lc = spec.constraints;
  for (Eigen::Index r = 0; r < lc.rows(); ++r) {
    const Eigen::RowVectorXd row = lc.B.row(r);
    if (lc.lower[r] == lc.upper[r]) {
      eq_rows.push_back(row);
      eq_rhs.push_back(lc.lower[r]);
      continue;
    }
    if (std::isfinite(lc.upper[r])) {
      in_rows.push_back(row);
      in_rhs.push_back(lc.upper[r]);
    }
    if (std::isfinite(lc.lower[r])) {
      in_rows.push_back(-row);
      in_rhs.push_back(-lc.lower[r]);
    }
  }
  for (Eigen::Index i = 0; i < I; ++i) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(I);
    e[i] = 1.0;
    in_rows.push_back(e);
    in_rhs.push_back(spec.position_bounds[i]);
    in_rows.push_back(-e);
    in_rhs.push_back(spec.position_bounds[i]);
  }
  prob.qp.A_eq.resize(static_cast<Eigen::Index>(eq_rows.size()), I);
  prob.qp.b_eq.resize(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t k = 0; k < eq_rows.size(); ++k) {
    prob.qp.A_eq.row(static_cast<Eigen::Index>(k)) = eq_rows[k];
    prob.qp.b_eq[static_cast<Eigen::Index>(k)] = eq_rhs[k];
  }
  prob.qp.A_in.resize(static_cast<Eigen::Index>(in_rows.size()), I);
  prob.qp.b_in.resize(static_cast<Eigen::Index>(in_rows.size()));
  for (std::size_t k = 0; k < in_rows.size(); ++k) {
    prob.qp.A_in.row(static_cast<Eigen::Index>(k)) = in_rows[k];
    prob.qp.b_in[static_cast<Eigen::Index>(k)] = in_rhs[k];
  }
  return prob;
}

FrontierCandidate make_candidate(const MeanVarianceProblem& prob, const PricePanel& pnl, const ProbabilityVector& p,
                                 double gamma, Eigen::VectorXd w) {
  FrontierCandidate c;
  c.expected_pnl = prob.mu.dot(w);
  c.variance = prob.variance(w);
  const Eigen::VectorXd portfolio = pnl.data * w;
  c.cvar = weighted_cvar(portfolio, p, gamma) + 0.0;
  c.weights = std::move(w);
  return c;
}

}  // namespace

std::vector<FrontierCandidate> mean_variance_candidates(const PricePanel& pnl, const ProbabilityVector& p,
                                                        const FrontierSpec& spec) {
  EPOOL_REQUIRE(pnl.num_scenarios() == p.size(), InvalidArgument,
                "p&l panel and probability vector disagree on the number of scenarios");
  spec.validate(pnl.num_instruments());
  auto prob = make_problem(pnl, p, spec);

  const Eigen::VectorXd w_min = prob.solve(0.0);
  const double v_min = prob.variance(w_min);

  // Grow theta until the maximum-return vertex stops moving.
  const double mu_scale = std::max(prob.mu.cwiseAbs().maxCoeff(), 1e-300);
  double theta_max = std::max(prob.qp.Q.diagonal().maxCoeff(), 1e-300) / mu_scale;
  Eigen::VectorXd w_max = prob.solve(theta_max);
  const double cap_scale = spec.position_bounds.maxCoeff();
  for (int k = 0; k < 80; ++k) {
    const Eigen::VectorXd next = prob.solve(2.0 * theta_max);
    theta_max *= 2.0;
    const bool settled = (next - w_max).cwiseAbs().maxCoeff() <= 1e-12 * cap_scale;
    w_max = next;
    if (settled) break;
  }
  const double v_max = prob.variance(w_max);

  std::vector<FrontierCandidate> out;
  out.push_back(make_candidate(prob, pnl, p, spec.gamma, w_min));
  if (!(v_max > v_min * (1.0 + 1e-9)) || v_max <= 0.0) return out;

  const double lo = std::max(v_min, 1e-6 * v_max);
  const std::size_t K = spec.num_variance_targets;
  for (std::size_t k = 0; k < K; ++k) {
    const double frac = K == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(K - 1);
    const double target = std::exp(std::log(lo) + frac * (std::log(v_max) - std::log(lo)));
    if (k + 1 == K) {
      out.push_back(make_candidate(prob, pnl, p, spec.gamma, w_max));
      break;
    }
    // Variance of w(theta) is nondecreasing in theta; bisect for the target.
    double a = 0.0;
    double b = theta_max;
    Eigen::VectorXd w_b = w_max;
    for (int it = 0; it < 60 && (b - a) > 1e-12 * theta_max; ++it) {
      const double mid = 0.5 * (a + b);
      Eigen::VectorXd w = prob.solve(mid);
      if (prob.variance(w) >= target) {
        b = mid;
        w_b = std::move(w);
      } else {
        a = mid;
      }
    }
    out.push_back(make_candidate(prob, pnl, p, spec.gamma, std::move(w_b)));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FrontierCandidate& x, const FrontierCandidate& y) { return x.variance < y.variance; });
  return out;
}

std::vector<FrontierPoint> select_frontier(const std::vector<FrontierCandidate>& candidates,
                                           const std::vector<double>& lambdas) {
  EPOOL_REQUIRE(!candidates.empty(), InvalidArgument, "no frontier candidates");
  std::vector<FrontierPoint> out;
  for (double lambda : lambdas) {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double value = candidates[k].expected_pnl - lambda * candidates[k].cvar;
      if (value > best_value) {
        best_value = value;
        best = k;
      }
    }
    const auto& c = candidates[best];
    out.push_back({lambda, c.weights, c.expected_pnl, c.cvar, c.variance, best});
  }
  return out;
}

std::vector<FrontierPoint> mean_cvar_frontier(const PricePanel& pnl, const ProbabilityVector& p,
                                              const FrontierSpec& spec) {
  return select_frontier(mean_variance_candidates(pnl, p, spec), spec.lambdas);
}

std::string format_frontier_csv(const std::vector<FrontierPoint>& frontier,
                                const std::vector<std::string>& instrument_ids) {
  std::ostringstream out;
  out << "lambda";
  for (const auto& id : instrument_ids) out << ',' << id;
  out << ",expected_pnl,cvar\n";
  for (const auto& pt : frontier) {
    EPOOL_REQUIRE(static_cast<std::size_t>(pt.weights.size()) == instrument_ids.size(), InvalidArgument,
                  "frontier weights do not match the instrument list");
    out << format_double(pt.lambda);
    for (Eigen::Index i = 0; i < pt.weights.size(); ++i) out << ',' << format_double(pt.weights[i]);
    out << ',' << format_double(pt.expected_pnl) << ',' << format_double(pt.cvar) << '\n';
  }
  return out.str();
}

void write_frontier_csv(const std::vector<FrontierPoint>& frontier, const std::vector<std::string>& instrument_ids,
                        const std::filesystem::path& path) {
  std::ofstream file(path);
  EPOOL_REQUIRE(file.good(), Error, "cannot open " + path.string() + " for writing");
  file << format_frontier_csv(frontier, instrument_ids);
}

}  // namespace epool
