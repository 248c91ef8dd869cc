#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "epool/error.hpp"
#include "epool/json_io.hpp"

using namespace epool;

TEST(JsonIo, ParseErrors) {
  EXPECT_THROW(parse_json("{\"a\": "), ParseError);
  EXPECT_THROW(read_json_file("/nonexistent/file.json"), ParseError);
  EXPECT_EQ(parse_json("[1,2]").size(), 2u);
}

TEST(JsonIo, VectorsAndMatrices) {
  const auto v = vector_from_json(parse_json("[1, 2.5, -3]"), "v");
  EXPECT_EQ(v, Eigen::Vector3d(1, 2.5, -3));
  const auto m = matrix_from_json(parse_json("[[1,2],[3,4]]"), "m");
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_EQ(matrix_from_json(to_json(m), "m"), m);
  EXPECT_EQ(vector_from_json(to_json(Eigen::VectorXd(v)), "v"), v);
  EXPECT_THROW(matrix_from_json(parse_json("[[1,2],[3]]"), "m"), ParseError);
  EXPECT_THROW(vector_from_json(parse_json("[1, \"x\"]"), "v"), ParseError);
}

TEST(JsonIo, ViewRoundTrip) {
  const auto j = parse_json(R"({"kind": "MeanLocation", "columns": ["M_1m - M_6m"], "direction": "<=",
                                "target": {"mode": "KappaSigma", "value": -1}, "confidence": 0.2, "id": "spread"})");
  const View v = view_from_json(j);
  EXPECT_EQ(v.kind, ViewKind::MeanLocation);
  EXPECT_EQ(v.columns[0], "M_1m - M_6m");
  EXPECT_EQ(v.direction, Direction::LessEqual);
  EXPECT_EQ(v.target->mode, TargetMode::KappaSigma);
  EXPECT_EQ(v.target->value, -1.0);
  EXPECT_EQ(*v.confidence, 0.2);
  const View back = view_from_json(to_json(v));
  EXPECT_EQ(back.id, "spread");
  EXPECT_EQ(back.target->value, -1.0);
  EXPECT_EQ(to_json(back), to_json(v));
}

TEST(JsonIo, ViewKindSpecificFields) {
  const View tail = view_from_json(parse_json(
      R"({"kind": "TailCodependence", "columns": ["M", "Y"], "direction": "=", "thresholds": [0.1, 0.1],
          "target": {"mode": "ReferenceMultiple", "value": 2}})"));
  EXPECT_EQ(tail.thresholds, (std::vector<double>{0.1, 0.1}));
  const View copula = view_from_json(parse_json(
      R"({"kind": "CopulaMoments", "columns": ["M", "Y"], "direction": "=", "order": 2,
          "target_sample": [[0.1, 0.2], [0.9, 0.7]]})"));
  EXPECT_EQ(copula.order, 2);
  EXPECT_EQ(copula.target_sample->rows(), 2);
  const View corr = view_from_json(parse_json(
      R"({"kind": "CorrelationStress", "columns": ["M", "Y"], "direction": "=", "shrinkage": [0.2, 0.5, 0.3],
          "anchor": false})"));
  EXPECT_FALSE(corr.anchor);
  EXPECT_EQ((*corr.shrinkage)[2], 0.3);
}

TEST(JsonIo, ViewRejections) {
  EXPECT_THROW(view_from_json(parse_json(R"({"kind": "MeanLocation", "columns": ["M"], "direction": "=",
                                             "target": {"mode": "Absolute", "value": 1}, "extra": 1})")),
               ParseError);
  EXPECT_THROW(view_from_json(parse_json(R"({"kind": "Bogus", "columns": ["M"], "direction": "="})")), ParseError);
  EXPECT_THROW(view_from_json(parse_json(R"({"kind": "MeanLocation", "columns": ["M"], "direction": "~"})")),
               ParseError);
  EXPECT_THROW(view_from_json(parse_json(R"({"kind": "Ranking", "columns": ["M"], "direction": ">="})")),
               ParseError);
  EXPECT_THROW(view_from_json(parse_json(R"({"kind": "MeanLocation", "columns": ["M"], "direction": "=",
                                             "target": {"mode": "Absolute", "value": 1}, "confidence": 1.5})")),
               ParseError);
}

TEST(JsonIo, BareArrayDocument) {
  const auto doc = view_document_from_json(parse_json(R"([
    {"kind": "MeanLocation", "columns": ["M"], "direction": "=", "target": {"mode": "Absolute", "value": 0.01}},
    {"kind": "Ranking", "columns": ["M", "Y"], "direction": ">="}])"));
  ASSERT_EQ(doc.users.size(), 1u);
  EXPECT_EQ(doc.users[0].user_id, "default");
  EXPECT_EQ(doc.users[0].overall_confidence, 1.0);
  EXPECT_EQ(doc.num_views(), 2u);
  EXPECT_EQ(doc.users[0].views[0].id, "v1");
  EXPECT_EQ(doc.users[0].views[1].id, "v2");
  const auto spec = doc.confidence_spec();
  EXPECT_EQ(spec.users[0].view_confidences[1].second, 1.0);
  EXPECT_EQ(view_document_from_json(parse_json("[]")).num_views(), 0u);
}

TEST(JsonIo, UsersDocument) {
  const auto j = parse_json(R"({"users": [
    {"user_id": "s1", "overall_confidence": 0.2, "views": [
      {"kind": "MeanLocation", "columns": ["M"], "direction": "=", "target": {"mode": "Absolute", "value": 0.01},
       "confidence": 0.5}]},
    {"user_id": "s2", "overall_confidence": 0.25, "views": []}]})");
  const auto doc = view_document_from_json(j);
  ASSERT_EQ(doc.users.size(), 2u);
  EXPECT_EQ(doc.users[1].overall_confidence, 0.25);
  EXPECT_EQ(doc.confidence_spec().users[0].view_confidences[0].second, 0.5);
  const auto again = view_document_from_json(to_json(doc));
  EXPECT_EQ(to_json(again), to_json(doc));

  EXPECT_THROW(view_document_from_json(parse_json(R"({"users": [{"user_id": "a", "overall_confidence": 0.7,
    "views": []}, {"user_id": "b", "overall_confidence": 0.7, "views": []}]})")),
               ParseError);
  EXPECT_THROW(view_document_from_json(parse_json(R"({"users": [{"user_id": "a", "views": []},
    {"user_id": "a", "views": []}]})")),
               ParseError);
  EXPECT_THROW(view_document_from_json(parse_json(R"([
    {"kind": "Ranking", "columns": ["M", "Y"], "direction": ">=", "id": "x"},
    {"kind": "Ranking", "columns": ["Y", "M"], "direction": ">=", "id": "x"}])")),
               ParseError);
}

TEST(JsonIo, BookRoundTripAndDefaults) {
  const auto j = parse_json(R"([{"underlying_id": "M", "vol_factor": "M_1m", "strike": 28, "expiry": 0.0833,
    "current_underlying": 28, "current_atm_vol": 0.3, "horizon": 0.004}])");
  const auto book = book_from_json(j);
  ASSERT_EQ(book.size(), 1u);
  EXPECT_EQ(book[0].id, "M");
  EXPECT_EQ(book[0].underlying_factor, "M");
  EXPECT_EQ(book[0].risk_free, 0.0);
  const auto back = book_from_json(Json::array({to_json(book[0])}));
  EXPECT_EQ(to_json(back[0]), to_json(book[0]));

  EXPECT_THROW(book_from_json(parse_json("[]")), ParseError);
  EXPECT_THROW(book_from_json(parse_json(R"([{"underlying_id": "M", "strike": 28, "expiry": 1,
    "current_underlying": 28, "current_atm_vol": 0.3, "horizon": 0.004}])")),
               ParseError);
  EXPECT_THROW(book_from_json(parse_json(R"([{"underlying_id": "M", "vol_factor": "v", "strike": 28, "expiry": 0.001,
    "current_underlying": 28, "current_atm_vol": 0.3, "horizon": 0.004}])")),
               ParseError);
}

TEST(JsonIo, NormalModelAndViews) {
  const auto model = normal_model_from_json(parse_json(R"({"mu": [0, 1], "sigma": [[1, 0.5], [0.5, 2]]})"));
  EXPECT_EQ(model.sigma(1, 1), 2.0);
  EXPECT_EQ(normal_model_from_json(to_json(model)).mu, model.mu);
  EXPECT_THROW(normal_model_from_json(parse_json(R"({"mu": [0, 1], "sigma": [[1, 2], [2, 1]]})")), ParseError);
  const auto views = normal_views_from_json(parse_json(R"({"q": [[1, 0]], "mu_q": [2]})"));
  EXPECT_TRUE(views.q.has_value());
  EXPECT_FALSE(views.g.has_value());
  EXPECT_THROW(normal_views_from_json(parse_json(R"({"q": [[1, 0]]})")), ParseError);
}

TEST(JsonIo, DiagnosticsFields) {
  PosteriorResult r{.posterior = ProbabilityVector::uniform(2)};
  r.relative_entropy = 0.25;
  r.iterations = 7;
  r.converged = true;
  r.status = SolveStatus::Converged;
  const Json d = diagnostics_json(r);
  for (const char* key : {"relative_entropy", "max_constraint_violation", "complementary_slackness", "iterations",
                          "converged", "clamped", "status", "message"})
    EXPECT_TRUE(d.contains(key)) << key;
  EXPECT_EQ(d["iterations"], 7);
  EXPECT_EQ(d["status"], "converged");
}

TEST(JsonIo, ReadsFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "epool_json_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "views.json";
  std::ofstream(path) << R"([{"kind": "MeanLocation", "columns": ["M"], "direction": ">=",
                             "target": {"mode": "Absolute", "value": 0}}])";
  EXPECT_EQ(read_view_document(path).num_views(), 1u);
  std::filesystem::remove_all(dir);
}
