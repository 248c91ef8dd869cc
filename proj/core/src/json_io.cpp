#include "epool/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "epool/error.hpp"

namespace epool {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ParseError("unknown field '" + it.key() + "' in " + what);
  }
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(what + " must be finite");
  return v;
}

std::string text(const Json& j, const std::string& what) {
  if (!j.is_string()) throw ParseError(what + " must be a string");
  return j.get<std::string>();
}

const Json& required(const Json& j, const std::string& key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(what + " is missing '" + key + "'");
  return *it;
}

}  // namespace

Json parse_json(const std::string& content) {
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_json(buffer.str());
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError(what + " rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError(what + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], what);
  }
  return m;
}

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

View view_from_json(const Json& j) {
  reject_unknown(j,
                 {"kind", "columns", "direction", "target", "order", "confidence", "id", "thresholds", "gamma",
                  "anchor", "shrinkage", "target_sample"},
                 "view");
  View v;
  v.kind = parse_view_kind(text(required(j, "kind", "view"), "kind"));
  const Json& cols = required(j, "columns", "view");
  if (!cols.is_array()) throw ParseError("view columns must be an array of expression strings");
  for (const auto& c : cols) v.columns.push_back(text(c, "column expression"));
  if (auto it = j.find("direction"); it != j.end()) v.direction = parse_direction(text(*it, "direction"));
  if (auto it = j.find("target"); it != j.end() && !it->is_null()) {
    reject_unknown(*it, {"mode", "value", "dispersion"}, "target");
    TargetSpec t;
    t.mode = parse_target_mode(text(required(*it, "mode", "target"), "target mode"));
    t.value = number(required(*it, "value", "target"), "target value");
    if (auto d = it->find("dispersion"); d != it->end()) t.dispersion = parse_dispersion(text(*d, "dispersion"));
    v.target = t;
  }
  if (auto it = j.find("order"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("order must be an integer");
    v.order = it->get<int>();
  }
  if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) v.confidence = number(*it, "confidence");
  if (auto it = j.find("id"); it != j.end()) v.id = text(*it, "id");
  if (auto it = j.find("thresholds"); it != j.end()) {
    const Eigen::VectorXd t = vector_from_json(*it, "thresholds");
    v.thresholds.assign(t.data(), t.data() + t.size());
  }
  if (auto it = j.find("gamma"); it != j.end() && !it->is_null()) v.gamma = number(*it, "gamma");
  if (auto it = j.find("anchor"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError("anchor must be a boolean");
    v.anchor = it->get<bool>();
  }
  if (auto it = j.find("shrinkage"); it != j.end() && !it->is_null()) {
    const Eigen::VectorXd s = vector_from_json(*it, "shrinkage");
    if (s.size() != 3) throw ParseError("shrinkage must hold three weights");
    v.shrinkage = Eigen::Vector3d(s[0], s[1], s[2]);
  }
  if (auto it = j.find("target_sample"); it != j.end() && !it->is_null())
    v.target_sample = matrix_from_json(*it, "target_sample");
  try {
    validate(v);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid view: ") + e.what());
  }
  return v;
}

Json to_json(const View& v) {
  Json j;
  j["kind"] = std::string(to_string(v.kind));
  j["columns"] = v.columns;
  j["direction"] = std::string(to_string(v.direction));
  if (v.target) {
    j["target"] = {{"mode", std::string(to_string(v.target->mode))}, {"value", v.target->value}};
    if (v.target->dispersion != Dispersion::StandardDeviation)
      j["target"]["dispersion"] = std::string(to_string(v.target->dispersion));
  }
  if (v.order != 1) j["order"] = v.order;
  if (v.confidence) j["confidence"] = *v.confidence;
  if (!v.id.empty()) j["id"] = v.id;
  if (!v.thresholds.empty()) j["thresholds"] = v.thresholds;
  if (v.gamma) j["gamma"] = *v.gamma;
  if (!v.anchor) j["anchor"] = false;
  if (v.shrinkage) j["shrinkage"] = {(*v.shrinkage)[0], (*v.shrinkage)[1], (*v.shrinkage)[2]};
  if (v.target_sample) j["target_sample"] = to_json(Eigen::MatrixXd(*v.target_sample));
  return j;
}

namespace {

std::vector<View> views_from_array(const Json& j) {
  if (!j.is_array()) throw ParseError("views must be a JSON array");
  std::vector<View> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    View v = view_from_json(j[i]);
    if (v.id.empty()) v.id = "v" + std::to_string(i + 1);
    if (!ids.insert(v.id).second) throw ParseError("duplicate view id '" + v.id + "'");
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::size_t ViewDocument::num_views() const {
  std::size_t n = 0;
  for (const auto& u : users) n += u.views.size();
  return n;
}

ConfidenceSpec ViewDocument::confidence_spec() const {
  ConfidenceSpec spec;
  for (const auto& u : users) {
    UserConfidence uc;
    uc.user_id = u.user_id;
    uc.overall_confidence = u.overall_confidence;
    for (const auto& v : u.views) uc.view_confidences.emplace_back(v.id, v.confidence.value_or(1.0));
    spec.users.push_back(std::move(uc));
  }
  return spec;
}

ViewDocument view_document_from_json(const Json& j) {
  ViewDocument doc;
  if (j.is_array()) {
    doc.users.push_back({"default", 1.0, views_from_array(j)});
    return doc;
  }
  reject_unknown(j, {"users"}, "view document");
  const Json& users = required(j, "users", "view document");
  if (!users.is_array()) throw ParseError("users must be an array");
  std::set<std::string> seen;
  for (const auto& u : users) {
    reject_unknown(u, {"user_id", "overall_confidence", "views"}, "user");
    UserViews uv;
    uv.user_id = text(required(u, "user_id", "user"), "user_id");
    if (!seen.insert(uv.user_id).second) throw ParseError("duplicate user_id '" + uv.user_id + "'");
    if (auto it = u.find("overall_confidence"); it != u.end())
      uv.overall_confidence = number(*it, "overall_confidence");
    uv.views = views_from_array(required(u, "views", "user"));
    doc.users.push_back(std::move(uv));
  }
  try {
    doc.confidence_spec().validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid confidences: ") + e.what());
  }
  return doc;
}

Json to_json(const ViewDocument& doc) {
  Json users = Json::array();
  for (const auto& u : doc.users) {
    Json views = Json::array();
    for (const auto& v : u.views) views.push_back(to_json(v));
    users.push_back({{"user_id", u.user_id}, {"overall_confidence", u.overall_confidence}, {"views", views}});
  }
  return {{"users", users}};
}

ViewDocument read_view_document(const std::filesystem::path& path) {
  return view_document_from_json(read_json_file(path));
}

ButterflyContract contract_from_json(const Json& j) {
  reject_unknown(j,
                 {"id", "underlying_id", "underlying_factor", "vol_factor", "strike", "expiry", "risk_free",
                  "smile_alpha", "smile_beta", "current_underlying", "current_atm_vol", "horizon"},
                 "contract");
  ButterflyContract c;
  c.underlying_id = text(required(j, "underlying_id", "contract"), "underlying_id");
  c.id = j.contains("id") ? text(j["id"], "id") : c.underlying_id;
  c.underlying_factor = j.contains("underlying_factor") ? text(j["underlying_factor"], "underlying_factor")
                                                        : c.underlying_id;
  c.vol_factor = text(required(j, "vol_factor", "contract"), "vol_factor");
  c.strike = number(required(j, "strike", "contract"), "strike");
  c.expiry = number(required(j, "expiry", "contract"), "expiry");
  c.risk_free = j.contains("risk_free") ? number(j["risk_free"], "risk_free") : 0.0;
  c.smile_alpha = j.contains("smile_alpha") ? number(j["smile_alpha"], "smile_alpha") : 0.0;
  c.smile_beta = j.contains("smile_beta") ? number(j["smile_beta"], "smile_beta") : 0.0;
  c.current_underlying = number(required(j, "current_underlying", "contract"), "current_underlying");
  c.current_atm_vol = number(required(j, "current_atm_vol", "contract"), "current_atm_vol");
  c.horizon = number(required(j, "horizon", "contract"), "horizon");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid contract: ") + e.what());
  }
  return c;
}

Json to_json(const ButterflyContract& c) {
  return {{"id", c.id},
          {"underlying_id", c.underlying_id},
          {"underlying_factor", c.underlying_factor},
          {"vol_factor", c.vol_factor},
          {"strike", c.strike},
          {"expiry", c.expiry},
          {"risk_free", c.risk_free},
          {"smile_alpha", c.smile_alpha},
          {"smile_beta", c.smile_beta},
          {"current_underlying", c.current_underlying},
          {"current_atm_vol", c.current_atm_vol},
          {"horizon", c.horizon}};
}

std::vector<ButterflyContract> book_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("book must be a non-empty JSON array of contracts");
  std::vector<ButterflyContract> out;
  std::set<std::string> ids;
  for (const auto& c : j) {
    out.push_back(contract_from_json(c));
    if (!ids.insert(out.back().id).second) throw ParseError("duplicate contract id '" + out.back().id + "'");
  }
  return out;
}

std::vector<ButterflyContract> read_book(const std::filesystem::path& path) {
  return book_from_json(read_json_file(path));
}

NormalModel normal_model_from_json(const Json& j) {
  reject_unknown(j, {"mu", "sigma"}, "normal model");
  Eigen::VectorXd mu = vector_from_json(required(j, "mu", "normal model"), "mu");
  Eigen::MatrixXd sigma = matrix_from_json(required(j, "sigma", "normal model"), "sigma");
  try {
    return NormalModel(std::move(mu), std::move(sigma));
  } catch (const Error& e) {
    throw ParseError(std::string("invalid normal model: ") + e.what());
  }
}

Json to_json(const NormalModel& model) {
  return {{"mu", to_json(model.mu)}, {"sigma", to_json(model.sigma)}};
}

NormalViewSpec normal_views_from_json(const Json& j) {
  reject_unknown(j, {"q", "mu_q", "g", "sigma_g"}, "normal views");
  NormalViewSpec spec;
  if (j.contains("q")) spec.q = matrix_from_json(j["q"], "q");
  if (j.contains("mu_q")) spec.mu_q = vector_from_json(j["mu_q"], "mu_q");
  if (j.contains("g")) spec.g = matrix_from_json(j["g"], "g");
  if (j.contains("sigma_g")) spec.sigma_g = matrix_from_json(j["sigma_g"], "sigma_g");
  if (spec.q.has_value() != spec.mu_q.has_value()) throw ParseError("q and mu_q must be given together");
  if (spec.g.has_value() != spec.sigma_g.has_value()) throw ParseError("g and sigma_g must be given together");
  return spec;
}

Json diagnostics_json(const PosteriorResult& r) {
  return {{"relative_entropy", r.relative_entropy},
          {"max_constraint_violation", r.max_constraint_violation},
          {"complementary_slackness", r.complementary_slackness},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"clamped", r.clamped},
          {"status", std::string(to_string(r.status))},
          {"message", r.message}};
}

}  // namespace epool
