#include "epool/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "epool/error.hpp"

namespace epool {

namespace {

constexpr double kPoolDrift = 1e-12;

void require_unit(double c, const std::string& what) {
  EPOOL_REQUIRE(c >= 0.0 && c <= 1.0 && std::isfinite(c), InvalidArgument, what + " must lie in [0,1]");
}

ProbabilityVector finish(Eigen::VectorXd blended) { return ProbabilityVector::renormalized(std::move(blended), kPoolDrift); }

}  // namespace

void ConfidenceSpec::validate() const {
  double total = 0.0;
  std::set<std::string> seen;
  for (const auto& u : users) {
    EPOOL_REQUIRE(seen.insert(u.user_id).second, InvalidArgument, "duplicate user '" + u.user_id + "'");
    require_unit(u.overall_confidence, "overall confidence of '" + u.user_id + "'");
    for (const auto& [id, c] : u.view_confidences) require_unit(c, "confidence of view '" + id + "'");
    total += u.overall_confidence;
  }
  EPOOL_REQUIRE(total <= 1.0 + 1e-12, InvalidArgument, "user confidences sum to more than one");
}

double ConfidenceSpec::reference_weight() const {
  double total = 0.0;
  for (const auto& u : users) total += u.overall_confidence;
  return std::max(0.0, 1.0 - total);
}

double PowerSetAllocation::probability_of(const ViewSubset& subset) const {
  for (const auto& [s, prob] : subsets) {
    if (s == subset) return prob;
  }
  return 0.0;
}

double PowerSetAllocation::marginal(const std::string& view_id) const {
  double total = 0.0;
  for (const auto& [s, prob] : subsets) {
    if (s.count(view_id)) total += prob;
  }
  return total;
}

ProbabilityVector pool_two(const ProbabilityVector& prior, const ProbabilityVector& posterior, double c) {
  require_unit(c, "confidence");
  EPOOL_REQUIRE(prior.size() == posterior.size(), InvalidArgument, "pooled vectors have different lengths");
  if (c == 0.0) return prior;
  if (c == 1.0) return posterior;
  return finish((1.0 - c) * prior.weights() + c * posterior.weights());
}

ProbabilityVector pool_multi(const std::map<std::string, ProbabilityVector>& posteriors, const ConfidenceSpec& spec,
                             const ProbabilityVector& prior) {
  spec.validate();
  const double c0 = spec.reference_weight();
  Eigen::VectorXd blended = c0 * prior.weights();
  for (const auto& user : spec.users) {
    if (user.overall_confidence == 0.0) continue;
    const auto it = posteriors.find(user.user_id);
    EPOOL_REQUIRE(it != posteriors.end(), InvalidArgument, "no posterior for user '" + user.user_id + "'");
    EPOOL_REQUIRE(it->second.size() == prior.size(), InvalidArgument, "posterior length does not match the prior");
    blended += user.overall_confidence * it->second.weights();
  }
  return finish(std::move(blended));
}

PowerSetAllocation power_set_allocation(const std::vector<std::pair<std::string, double>>& view_confidences) {
  std::vector<double> levels;
  for (const auto& [id, c] : view_confidences) {
    require_unit(c, "confidence of view '" + id + "'");
    if (c > 0.0) levels.push_back(c);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  PowerSetAllocation out;
  const double top = levels.empty() ? 0.0 : levels.front();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double next = k + 1 < levels.size() ? levels[k + 1] : 0.0;
    ViewSubset subset;
    for (const auto& [id, c] : view_confidences) {
      if (c >= levels[k]) subset.insert(id);
    }
    out.subsets.emplace_back(std::move(subset), levels[k] - next);
  }
  out.subsets.emplace_back(ViewSubset{}, 1.0 - top);
  return out;
}

ProbabilityVector posterior_from_power_set(const PowerSetAllocation& allocation,
                                           const std::map<ViewSubset, ProbabilityVector>& subset_posteriors,
                                           const ProbabilityVector& prior) {
  Eigen::VectorXd blended = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prior.size()));
  double total = 0.0;
  for (const auto& [subset, prob] : allocation.subsets) {
    EPOOL_REQUIRE(prob >= 0.0, InvalidArgument, "negative subset probability");
    total += prob;
    if (prob == 0.0) continue;
    if (subset.empty()) {
      blended += prob * prior.weights();
      continue;
    }
    const auto it = subset_posteriors.find(subset);
    EPOOL_REQUIRE(it != subset_posteriors.end(), InvalidArgument, "missing posterior for a subset with positive mass");
    EPOOL_REQUIRE(it->second.size() == prior.size(), InvalidArgument, "subset posterior length does not match the prior");
    blended += prob * it->second.weights();
  }
  EPOOL_REQUIRE(std::abs(total - 1.0) <= 1e-12, InvalidArgument, "subset probabilities do not sum to one");
  return finish(std::move(blended));
}

double skill_confidence(const TrackRecord& track) {
  EPOOL_REQUIRE(track.num_past_views >= 0, InvalidArgument, "number of past views must be nonnegative");
  EPOOL_REQUIRE(track.view_outcome_correlation >= -1.0 && track.view_outcome_correlation <= 1.0, InvalidArgument,
                "correlation must lie in [-1,1]");
  const double seniority = 1.0 - 1.0 / (1.0 + static_cast<double>(track.num_past_views));
  return std::max(0.0, track.view_outcome_correlation) * seniority;
}

}  // namespace epool
