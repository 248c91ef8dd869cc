#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "epool/scenario.hpp"

namespace epool {

/// Blending of full-confidence posteriors with the reference probabilities.

struct UserConfidence {
  std::string user_id;
  double overall_confidence = 0.0;
  std::vector<std::pair<std::string, double>> view_confidences;
};

struct ConfidenceSpec {
  std::vector<UserConfidence> users;

  /// Sum of overall confidences must not exceed one; every confidence in [0,1].
  void validate() const;
  /// Mass left to the reference model: 1 - sum of user confidences.
  double reference_weight() const;
};

using ViewSubset = std::set<std::string>;

/// Probability on subsets of views. Subsets not listed have probability zero.
struct PowerSetAllocation {
  std::vector<std::pair<ViewSubset, double>> subsets;

  double probability_of(const ViewSubset& subset) const;
  /// Total probability of the subsets containing `view_id`.
  double marginal(const std::string& view_id) const;
};

/// (1 - c) prior + c posterior.
ProbabilityVector pool_two(const ProbabilityVector& prior, const ProbabilityVector& posterior, double c);

/// Reference weight c0 = 1 - sum c_s on the prior plus c_s on each user's posterior.
ProbabilityVector pool_multi(const std::map<std::string, ProbabilityVector>& posteriors, const ConfidenceSpec& spec,
                             const ProbabilityVector& prior);

/// Comonotone (nested) allocation: with distinct confidence levels
/// c(1) > c(2) > ... the set of views at or above c(k) receives c(k) - c(k+1),
/// and the empty set receives 1 - max c. Every view's marginal equals its confidence.
PowerSetAllocation power_set_allocation(const std::vector<std::pair<std::string, double>>& view_confidences);

/// Probability-weighted blend of the subset posteriors; the empty subset maps to the prior.
ProbabilityVector posterior_from_power_set(const PowerSetAllocation& allocation,
                                           const std::map<ViewSubset, ProbabilityVector>& subset_posteriors,
                                           const ProbabilityVector& prior);

struct TrackRecord {
  int num_past_views = 0;
  double view_outcome_correlation = 0.0;
};

/// Ad hoc skill score max(0, rho) (1 - 1/(1 + n)); increasing in both the
/// number of past views and their correlation with realized outcomes.
double skill_confidence(const TrackRecord& track);

}  // namespace epool
