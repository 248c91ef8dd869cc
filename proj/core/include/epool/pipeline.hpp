#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epool/confidence.hpp"
#include "epool/entropy_solver.hpp"
#include "epool/json_io.hpp"
#include "epool/scenario.hpp"
#include "epool/view_compiler.hpp"

namespace epool {

/// One full-confidence solve on a subset of a user's views.
struct SubsetSolve {
  ViewSubset views;
  double probability = 0.0;
  std::optional<PosteriorResult> result;  ///< empty for the empty subset
};

struct UserPosterior {
  std::string user_id;
  double overall_confidence = 0.0;
  std::vector<SubsetSolve> subsets;
  std::optional<ProbabilityVector> posterior;
};

/// Views of every user solved at full confidence per power-set subset, blended
/// within each user by view confidence, then pooled across users.
struct PooledPosterior {
  SolveStatus status = SolveStatus::Converged;
  std::string message;
  std::vector<UserPosterior> users;
  std::optional<ProbabilityVector> posterior;  ///< set only when every solve converged

  /// Aggregated diagnostics: worst violation and slackness, summed iterations and clamps.
  Json diagnostics(const ProbabilityVector& prior) const;
};

PooledPosterior solve_view_document(const ScenarioPanel& panel, const ProbabilityVector& prior,
                                    const ViewDocument& views, const SolverConfig& config = {},
                                    const CompileOptions& options = {});

}  // namespace epool
