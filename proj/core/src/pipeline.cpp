#include "epool/pipeline.hpp"

#include <algorithm>
#include <map>

#include "epool/error.hpp"

namespace epool {

namespace {

int severity(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::NotConverged: return 1;
    case SolveStatus::Infeasible: return 2;
  }
  return 2;
}

}  // namespace

PooledPosterior solve_view_document(const ScenarioPanel& panel, const ProbabilityVector& prior,
                                    const ViewDocument& views, const SolverConfig& config,
                                    const CompileOptions& options) {
  EPOOL_REQUIRE(panel.num_scenarios() == prior.size(), InvalidArgument,
                "prior length does not match the number of scenarios");
  const ConfidenceSpec spec = views.confidence_spec();
  spec.validate();

  PooledPosterior out;
  if (views.num_views() == 0) {
    out.posterior = prior;
    for (const auto& u : views.users) out.users.push_back({u.user_id, u.overall_confidence, {}, prior});
    return out;
  }

  std::map<std::string, ProbabilityVector> user_posteriors;
  for (std::size_t u = 0; u < views.users.size(); ++u) {
    const auto& user = views.users[u];
    UserPosterior up;
    up.user_id = user.user_id;
    up.overall_confidence = user.overall_confidence;
    const auto allocation = power_set_allocation(spec.users[u].view_confidences);
    std::map<ViewSubset, ProbabilityVector> subset_posteriors;
    bool ok = true;
    for (const auto& [subset, probability] : allocation.subsets) {
      SubsetSolve s{subset, probability, std::nullopt};
      if (!subset.empty() && probability > 0.0) {
        std::vector<View> chosen;
        for (const auto& v : user.views)
          if (subset.count(v.id)) chosen.push_back(v);
        const auto constraints = compile(chosen, panel, prior, options);
        PosteriorResult r = solve(constraints, prior, config);
        if (severity(r.status) > severity(out.status)) {
          out.status = r.status;
          out.message = "user '" + user.user_id + "': " + r.message;
        }
        if (r.status == SolveStatus::Converged)
          subset_posteriors.emplace(subset, r.posterior);
        else
          ok = false;
        s.result = std::move(r);
      }
      up.subsets.push_back(std::move(s));
    }
    if (ok) {
      up.posterior = posterior_from_power_set(allocation, subset_posteriors, prior);
      user_posteriors.emplace(user.user_id, *up.posterior);
    }
    out.users.push_back(std::move(up));
  }
  if (out.status == SolveStatus::Converged) out.posterior = pool_multi(user_posteriors, spec, prior);
  return out;
}

Json PooledPosterior::diagnostics(const ProbabilityVector& prior) const {
  double violation = 0.0;
  double slackness = 0.0;
  long iterations = 0;
  std::size_t clamped = 0;
  Json users_json = Json::array();
  for (const auto& u : users) {
    Json subsets = Json::array();
    for (const auto& s : u.subsets) {
      Json sj = {{"views", std::vector<std::string>(s.views.begin(), s.views.end())}, {"probability", s.probability}};
      if (s.result) {
        sj["diagnostics"] = diagnostics_json(*s.result);
        violation = std::max(violation, s.result->max_constraint_violation);
        slackness = std::max(slackness, s.result->complementary_slackness);
        iterations += s.result->iterations;
        clamped += s.result->clamped;
      }
      subsets.push_back(std::move(sj));
    }
    Json uj = {{"user_id", u.user_id}, {"overall_confidence", u.overall_confidence}, {"subsets", subsets}};
    if (u.posterior) uj["relative_entropy"] = relative_entropy(*u.posterior, prior);
    users_json.push_back(std::move(uj));
  }
  Json out = {{"status", std::string(to_string(status))},
              {"converged", status == SolveStatus::Converged},
              {"max_constraint_violation", violation},
              {"complementary_slackness", slackness},
              {"iterations", iterations},
              {"clamped", clamped},
              {"users", users_json}};
  out["relative_entropy"] = posterior ? Json(relative_entropy(*posterior, prior)) : Json(nullptr);
  if (!message.empty()) out["message"] = message;
  return out;
}

}  // namespace epool
