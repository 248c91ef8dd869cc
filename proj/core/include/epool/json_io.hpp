#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "epool/analytic_normal.hpp"
#include "epool/confidence.hpp"
#include "epool/entropy_solver.hpp"
#include "epool/option_pricing.hpp"
#include "epool/views.hpp"

namespace epool {

using Json = nlohmann::json;

/// Parses a file or string as JSON; syntax errors become ParseError.
Json read_json_file(const std::filesystem::path& path);
Json parse_json(const std::string& text);

Eigen::VectorXd vector_from_json(const Json& j, const std::string& what);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what);
Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);

/// One view object. Unknown fields are rejected.
View view_from_json(const Json& j);
Json to_json(const View& view);

struct UserViews {
  std::string user_id;
  double overall_confidence = 1.0;
  std::vector<View> views;
};

/// Either a bare array of views (one user, full confidence) or
/// {"users": [{"user_id", "overall_confidence", "views"}]}.
/// Views without an id are numbered v1, v2, ... within their user.
struct ViewDocument {
  std::vector<UserViews> users;

  std::size_t num_views() const;
  /// Per-view confidences default to 1.
  ConfidenceSpec confidence_spec() const;
};

ViewDocument view_document_from_json(const Json& j);
Json to_json(const ViewDocument& doc);
ViewDocument read_view_document(const std::filesystem::path& path);

ButterflyContract contract_from_json(const Json& j);
Json to_json(const ButterflyContract& c);
std::vector<ButterflyContract> book_from_json(const Json& j);
std::vector<ButterflyContract> read_book(const std::filesystem::path& path);

NormalModel normal_model_from_json(const Json& j);
Json to_json(const NormalModel& model);
NormalViewSpec normal_views_from_json(const Json& j);

/// {relative_entropy, max_constraint_violation, complementary_slackness, iterations, converged, clamped}
/// plus status and message.
Json diagnostics_json(const PosteriorResult& result);

}  // namespace epool
