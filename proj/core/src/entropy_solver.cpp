#include "epool/entropy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epool/error.hpp"

namespace epool {

namespace {

// Reduced-Hessian eigenvalues are floored at this fraction of the largest one.
// The floor turns the Newton step into a long steepest-descent step along
// directions the Hessian cannot see, which is what drives the dual value past
// the weak-duality bound on inconsistent systems.
constexpr double kEigenFloor = 1e-10;

struct ScaledSystem {
  Eigen::MatrixXd A;      // [F; H] with each row divided by its max-abs coefficient
  Eigen::VectorXd b;      // matching right-hand sides
  Eigen::VectorXd scale;  // multiplier on each original row
  Eigen::Index num_ineq = 0;
};

ScaledSystem scale_system(const LinearConstraintSet& c) {
  ScaledSystem s;
  s.num_ineq = c.F.rows();
  const Eigen::Index m = c.F.rows() + c.H.rows();
  const Eigen::Index J = c.H.cols();
  s.A.resize(m, J);
  s.b.resize(m);
  s.scale.resize(m);
  if (c.F.rows() > 0) {
    s.A.topRows(c.F.rows()) = c.F;
    s.b.head(c.F.rows()) = c.f;
  }
  s.A.bottomRows(c.H.rows()) = c.H;
  s.b.tail(c.H.rows()) = c.h;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double peak = s.A.row(i).cwiseAbs().maxCoeff();
    EPOOL_REQUIRE(peak > 0.0, DegenerateData, "constraint row " + std::to_string(i) + " is identically zero");
    s.scale[i] = 1.0 / peak;
    s.A.row(i) *= s.scale[i];
    s.b[i] *= s.scale[i];
  }
  return s;
}

struct Iterate {
  Eigen::VectorXd mu;
  Eigen::VectorXd x;
  Eigen::VectorXd gradient;  // of phi = sum(x) + mu'b, i.e. b - A x
  double phi = 0.0;
  std::size_t clamped_low = 0;
  std::size_t clamped_high = 0;
};

Iterate evaluate(const ScaledSystem& sys, const Eigen::VectorXd& log_prior, Eigen::VectorXd mu) {
  Iterate it;
  Eigen::VectorXd exponent = log_prior.array() - 1.0;
  exponent.noalias() -= sys.A.transpose() * mu;
  for (Eigen::Index j = 0; j < exponent.size(); ++j) {
    if (exponent[j] > kExponentClamp) {
      exponent[j] = kExponentClamp;
      ++it.clamped_high;
    } else if (exponent[j] < -kExponentClamp) {
      exponent[j] = -kExponentClamp;
      ++it.clamped_low;
    }
  }
  it.x = exponent.array().exp();
  it.phi = it.x.sum() + mu.dot(sys.b);
  it.gradient = sys.b;
  it.gradient.noalias() -= sys.A * it.x;
  it.mu = std::move(mu);
  return it;
}

Eigen::VectorXd project(Eigen::VectorXd mu, Eigen::Index num_ineq) {
  for (Eigen::Index i = 0; i < num_ineq; ++i) mu[i] = std::max(mu[i], 0.0);
  return mu;
}

Eigen::VectorXd projected_gradient(const Iterate& it, Eigen::Index num_ineq) {
  Eigen::VectorXd pg = it.gradient;
  for (Eigen::Index i = 0; i < num_ineq; ++i) {
    if (it.mu[i] <= 0.0) pg[i] = std::min(pg[i], 0.0);
  }
  return pg;
}

Eigen::MatrixXd exact_hessian(const ScaledSystem& sys, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd weighted = sys.A * x.asDiagonal();
  return weighted * sys.A.transpose();
}

/// Solves H d = -g on the free block with eigenvalues floored from below.
Eigen::VectorXd floored_newton_step(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
  Eigen::VectorXd values = eig.eigenvalues();
  const double top = std::max(values.maxCoeff(), std::numeric_limits<double>::min());
  const double floor = kEigenFloor * top;
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = 1.0 / std::max(values[i], floor);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return -(v * (values.asDiagonal() * (v.transpose() * gradient)));
}

void bfgs_update(Eigen::MatrixXd& model, const Eigen::VectorXd& step, const Eigen::VectorXd& change) {
  const double sy = step.dot(change);
  if (sy <= 1e-12 * step.norm() * change.norm()) return;
  const Eigen::VectorXd bs = model * step;
  const double sbs = step.dot(bs);
  if (sbs <= 0.0) return;
  model += change * change.transpose() / sy - bs * bs.transpose() / sbs;
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NotConverged: return "not_converged";
  }
  return "?";
}

void SolverConfig::validate() const {
  EPOOL_REQUIRE(dual_tolerance > 0.0 && feasibility_tolerance > 0.0, InvalidArgument, "tolerances must be positive");
  EPOOL_REQUIRE(max_iterations > 0, InvalidArgument, "max_iterations must be positive");
  EPOOL_REQUIRE(armijo_fraction > 0.0 && armijo_fraction < 0.5, InvalidArgument, "armijo_fraction must lie in (0,1/2)");
  EPOOL_REQUIRE(backtrack_factor > 0.0 && backtrack_factor < 1.0, InvalidArgument,
                "backtrack_factor must lie in (0,1)");
  EPOOL_REQUIRE(max_backtracks > 0, InvalidArgument, "max_backtracks must be positive");
}

double relative_entropy(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p) {
  EPOOL_REQUIRE(p_tilde.size() == p.size(), InvalidArgument, "relative entropy of vectors with different lengths");
  double total = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p_tilde[j] <= 0.0) continue;
    EPOOL_REQUIRE(p[j] > 0.0, InvalidArgument,
                  "support violation: scenario " + std::to_string(j) + " has posterior mass but zero prior mass");
    total += p_tilde[j] * (std::log(p_tilde[j]) - std::log(p[j]));
  }
  return total;
}

double relative_entropy(const ProbabilityVector& p_tilde, const ProbabilityVector& p) {
  return relative_entropy(p_tilde.weights(), p.weights());
}

Eigen::VectorXd primal_from_duals(const Eigen::VectorXd& lambda, const Eigen::VectorXd& nu,
                                  const LinearConstraintSet& constraints, const ProbabilityVector& prior,
                                  std::size_t* clamped) {
  EPOOL_REQUIRE(lambda.size() == constraints.F.rows() && nu.size() == constraints.H.rows(), InvalidArgument,
                "multiplier dimensions do not match the constraint set");
  EPOOL_REQUIRE(constraints.num_scenarios() == prior.size(), InvalidArgument,
                "constraint set and prior have different scenario counts");
  Eigen::VectorXd exponent = prior.weights().array().log() - 1.0;
  if (lambda.size() > 0) exponent.noalias() -= constraints.F.transpose() * lambda;
  exponent.noalias() -= constraints.H.transpose() * nu;
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < exponent.size(); ++j) {
    if (std::abs(exponent[j]) > kExponentClamp) {
      exponent[j] = std::clamp(exponent[j], -kExponentClamp, kExponentClamp);
      ++count;
    }
  }
  if (clamped) *clamped = count;
  return exponent.array().exp();
}

DualEvaluation dual_value_and_gradient(const Eigen::VectorXd& lambda, const Eigen::VectorXd& nu,
                                       const LinearConstraintSet& constraints, const ProbabilityVector& prior) {
  DualEvaluation out;
  out.primal = primal_from_duals(lambda, nu, constraints, prior, &out.clamped);
  const Eigen::VectorXd& x = out.primal;
  const Eigen::VectorXd ineq = constraints.F * x - constraints.f;
  const Eigen::VectorXd eq = constraints.H * x - constraints.h;
  const Eigen::VectorXd log_ratio = x.array().log() - prior.weights().array().log();
  out.value = x.dot(log_ratio) + lambda.dot(ineq) + nu.dot(eq);
  out.gradient.resize(ineq.size() + eq.size());
  out.gradient << ineq, eq;
  return out;
}

PosteriorResult solve(const LinearConstraintSet& constraints, const ProbabilityVector& prior,
                      const SolverConfig& config) {
  config.validate();
  EPOOL_REQUIRE(constraints.num_scenarios() == prior.size(), InvalidArgument,
                "constraint set and prior have different scenario counts");
  EPOOL_REQUIRE(constraints.H.rows() >= 1 && (constraints.H.row(0).array() == 1.0).all() && constraints.h[0] == 1.0,
                InvalidArgument, "constraint set must start with the normalization row");
  EPOOL_REQUIRE(prior.strictly_positive(), InvalidArgument,
                "support violation: the prior must give every scenario positive mass");

  if (constraints.F.rows() == 0 && constraints.H.rows() == 1) {
    PosteriorResult result{.posterior = prior};
    result.lambda = Eigen::VectorXd(0);
    result.nu = Eigen::VectorXd::Constant(1, -1.0);
    result.converged = true;
    result.status = SolveStatus::Converged;
    result.message = "converged";
    return result;
  }

  const ScaledSystem sys = scale_system(constraints);
  const Eigen::Index m = sys.A.rows();
  const Eigen::Index mi = sys.num_ineq;
  const Eigen::VectorXd log_prior = prior.weights().array().log();
  // Weak duality: every feasible q has KL(q, p) <= max_j (-ln p_j), so a dual
  // value above this bound certifies that no feasible q exists.
  const double kl_bound = -log_prior.minCoeff();

  const bool use_exact = config.hessian == HessianMode::Exact ||
                         (config.hessian == HessianMode::Automatic &&
                          static_cast<std::size_t>(m) <= config.exact_hessian_max_rows);

  Iterate current = evaluate(sys, log_prior, Eigen::VectorXd::Zero(m));
  Eigen::MatrixXd model;
  if (!use_exact) {
    model = Eigen::MatrixXd::Zero(m, m);
    model.diagonal() = (sys.A.array().square().rowwise() * current.x.transpose().array()).rowwise().sum();
  }

  SolveStatus status = SolveStatus::NotConverged;
  std::string message = "iteration limit reached";
  int iterations = 0;
  for (; iterations <= config.max_iterations; ++iterations) {
    const Eigen::VectorXd pg = projected_gradient(current, mi);
    if (pg.cwiseAbs().maxCoeff() <= config.dual_tolerance) {
      status = SolveStatus::Converged;
      message = "converged";
      break;
    }
    if (current.clamped_high == 0 && -current.phi > kl_bound * (1.0 + 1e-9) + 1e-9) {
      status = SolveStatus::Infeasible;
      message = "dual value exceeds the largest attainable relative entropy: constraints are inconsistent";
      break;
    }
    if (iterations == config.max_iterations) break;

    const Eigen::MatrixXd hessian = use_exact ? exact_hessian(sys, current.x) : model;

    // Bertsekas-style active set: bound multipliers at (or within eps of) zero
    // whose gradient pushes them further down are held fixed.
    const double eps = std::min(1e-10, (current.mu - project(current.mu - current.gradient, mi)).norm());
    std::vector<Eigen::Index> free_idx;
    std::vector<Eigen::Index> active_idx;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i < mi && current.mu[i] <= eps && current.gradient[i] > 0.0) active_idx.push_back(i);
      else free_idx.push_back(i);
    }
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(m);
    if (!free_idx.empty()) {
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      Eigen::MatrixXd reduced(nf, nf);
      Eigen::VectorXd reduced_gradient(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        reduced_gradient[a] = current.gradient[free_idx[a]];
        for (Eigen::Index b = 0; b < nf; ++b) reduced(a, b) = hessian(free_idx[a], free_idx[b]);
      }
      const Eigen::VectorXd step = floored_newton_step(reduced, reduced_gradient);
      for (Eigen::Index a = 0; a < nf; ++a) direction[free_idx[a]] = step[a];
    }
    for (const auto i : active_idx) {
      direction[i] = -current.gradient[i] / std::max(hessian(i, i), std::numeric_limits<double>::min());
    }

    const double current_pg = pg.cwiseAbs().maxCoeff();
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (current.x.sum() + current.mu.cwiseProduct(sys.b).cwiseAbs().sum() + 1.0);
    auto line_search = [&](const Eigen::VectorXd& d, Iterate& accepted) {
      double alpha = 1.0;
      for (int k = 0; k < config.max_backtracks; ++k, alpha *= config.backtrack_factor) {
        Eigen::VectorXd trial_mu = project(current.mu + alpha * d, mi);
        const Eigen::VectorXd delta = trial_mu - current.mu;
        if (delta.cwiseAbs().maxCoeff() == 0.0) return false;
        Iterate trial = evaluate(sys, log_prior, std::move(trial_mu));
        if (!std::isfinite(trial.phi)) continue;
        const double predicted = config.armijo_fraction * current.gradient.dot(delta);
        if (trial.phi <= current.phi + predicted) {
          // Near the optimum the predicted decrease drops below the rounding
          // noise of phi; there, insist on a smaller projected gradient instead.
          if (-predicted > noise || projected_gradient(trial, mi).cwiseAbs().maxCoeff() < current_pg) {
            accepted = std::move(trial);
            return true;
          }
        } else if (-predicted <= noise && trial.phi <= current.phi + noise &&
                   projected_gradient(trial, mi).cwiseAbs().maxCoeff() < current_pg) {
          accepted = std::move(trial);
          return true;
        }
      }
      return false;
    };

    Iterate next;
    bool moved = line_search(direction, next);
    if (!moved) {
      const double curvature = std::max(hessian.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
      moved = line_search(-current.gradient / curvature, next);
    }
    if (!moved) {
      message = "line search failed to decrease the dual objective";
      break;
    }
    if (!use_exact) bfgs_update(model, next.mu - current.mu, next.gradient - current.gradient);
    current = std::move(next);
  }

  // Back to the original row scaling: A_scaled = diag(s) A, so mu_original = s .* mu_scaled.
  const Eigen::VectorXd mu = current.mu.cwiseProduct(sys.scale);
  Eigen::VectorXd x = current.x;
  const double total = x.sum();
  if (status == SolveStatus::Converged && std::abs(total - 1.0) > config.feasibility_tolerance) {
    status = SolveStatus::NotConverged;
    message = "primal mass drifted from one by more than the feasibility tolerance";
  }
  x /= total;

  PosteriorResult result{.posterior = ProbabilityVector(x)};
  result.lambda = mu.head(mi);
  result.nu = mu.tail(m - mi);
  result.relative_entropy = std::max(relative_entropy(x, prior.weights()), 0.0);
  result.max_constraint_violation = constraints.max_violation(x);
  double slackness = 0.0;
  if (mi > 0) {
    const Eigen::VectorXd residual = constraints.F * x - constraints.f;
    slackness = result.lambda.cwiseProduct(residual).cwiseAbs().maxCoeff();
  }
  result.complementary_slackness = slackness;
  result.dual_value = -current.phi;
  result.iterations = iterations;
  result.status = status;
  result.converged = status == SolveStatus::Converged;
  result.clamped = current.clamped_low + current.clamped_high;
  result.message = std::move(message);
  return result;
}

}  // namespace epool
