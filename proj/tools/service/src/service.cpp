#include "epool_service/service.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "epool/error.hpp"
#include "epool/expression.hpp"
#include "epool/statistics.hpp"

namespace epool::service {

namespace {

const std::vector<double> kDefaultQuantiles{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

Response error(int status, const std::string& message, std::optional<std::uint64_t> revision = std::nullopt) {
  Json body = {{"error", message}};
  if (revision) body["revision"] = *revision;
  return {status, std::move(body)};
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  return parse_json(body);
}

void check_fields(const Json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError("request body must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      throw ParseError("unknown field '" + it.key() + "'");
  }
}

// 409 when the client names a revision other than the current one.
std::optional<Response> stale(const Json& body, const Session& s) {
  if (!body.is_object() || !body.contains("expected_revision")) return std::nullopt;
  const Json& e = body["expected_revision"];
  if (!e.is_number_unsigned() && !e.is_number_integer()) return error(400, "expected_revision must be an integer");
  if (e.get<std::int64_t>() != static_cast<std::int64_t>(s.revision))
    return error(409, "stale revision: session is at " + std::to_string(s.revision), s.revision);
  return std::nullopt;
}

bool posterior_fresh(const Session& s) { return s.solved && s.solved->posterior && s.solved_at > s.views_changed; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw ParseError(what + " is not a number");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(what + " is not a number");
  }
}

Json describe_json(const Eigen::VectorXd& column, const ProbabilityVector& p, const std::vector<double>& levels) {
  const auto d = describe(column, p, levels);
  Json q = Json::object();
  for (const auto& [level, value] : d.quantiles) q[format_double(level)] = value;
  return {{"mean", d.mean}, {"std", d.std}, {"median", d.median}, {"quantiles", q}};
}

Json session_json(const Session& s) {
  Json users = Json::array();
  for (const auto& u : s.users) {
    Json views = Json::array();
    for (const auto& v : u.views) views.push_back(to_json(v));
    users.push_back({{"user_id", u.user_id}, {"overall_confidence", u.overall_confidence}, {"views", views}});
  }
  return {{"session_id", s.id},
          {"revision", s.revision},
          {"num_scenarios", s.panel.num_scenarios()},
          {"factors", s.panel.factor_names()},
          {"users", users},
          {"solved", posterior_fresh(s)},
          {"has_frontier", s.frontier.has_value() && !s.frontier->points.empty()}};
}

Json frontier_json(const Session& s) {
  const auto& f = *s.frontier;
  Json points = Json::array();
  for (const auto& pt : f.points) {
    points.push_back({{"lambda", pt.lambda},
                      {"weights", to_json(pt.weights)},
                      {"expected_pnl", pt.expected_pnl},
                      {"cvar", pt.cvar},
                      {"variance", pt.variance}});
  }
  return {{"revision", s.revision},
          {"posterior_revision", f.computed_at},
          {"gamma", f.spec.gamma},
          {"instruments", f.pnl.instrument_ids},
          {"flagged_scenarios", f.pnl.flagged_scenarios.size()},
          {"frontier", points}};
}

ConfidenceSpec confidence_of(const std::vector<UserViews>& users) {
  ViewDocument doc{users};
  return doc.confidence_spec();
}

template <typename F>
Response guarded(F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    return error(400, e.what());
  } catch (const InvalidArgument& e) {
    return error(400, e.what());
  } catch (const DegenerateData& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) { options_.solver.validate(); }

std::size_t Service::num_sessions() const {
  std::shared_lock lock(store_mutex_);
  return sessions_.size();
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::shared_lock lock(store_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::create_session(const std::string& text) {
  return guarded([&]() -> Response {
    const Json body = parse_body(text);
    check_fields(body, {"panel_csv", "factors", "scenarios", "prior", "users"});
    std::optional<ScenarioPanel> panel;
    if (body.contains("panel_csv")) {
      if (!body["panel_csv"].is_string()) throw ParseError("panel_csv must be a string");
      panel = parse_panel_csv(body["panel_csv"].get<std::string>());
    } else if (body.contains("factors") && body.contains("scenarios")) {
      if (!body["factors"].is_array()) throw ParseError("factors must be an array of names");
      std::vector<std::string> names;
      for (const auto& n : body["factors"]) {
        if (!n.is_string()) throw ParseError("factor names must be strings");
        names.push_back(n.get<std::string>());
      }
      panel = ScenarioPanel(std::move(names), matrix_from_json(body["scenarios"], "scenarios"));
    } else {
      throw ParseError("session needs panel_csv, or factors and scenarios");
    }
    ProbabilityVector prior = ProbabilityVector::uniform(panel->num_scenarios());
    if (body.contains("prior")) {
      Eigen::VectorXd w = vector_from_json(body["prior"], "prior");
      if (static_cast<std::size_t>(w.size()) != panel->num_scenarios())
        throw ParseError("prior length does not match the panel");
      prior = ProbabilityVector::renormalized(std::move(w), kProbabilityFileTolerance);
    }
    const std::string id = "s" + std::to_string(next_id_.fetch_add(1));
    auto session = std::make_shared<Session>(id, std::move(*panel), std::move(prior));
    if (body.contains("users")) {
      auto doc = view_document_from_json(body["users"].is_array() ? Json{{"users", body["users"]}} : body["users"]);
      for (const auto& u : doc.users) view_panel_for(u.views, session->panel);
      session->users = std::move(doc.users);
    }
    {
      std::unique_lock lock(store_mutex_);
      sessions_.emplace(id, session);
    }
    std::lock_guard lock(session->mutex);
    return {201, session_json(*session)};
  });
}

Response Service::get_session(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  std::lock_guard lock(s->mutex);
  return {200, session_json(*s)};
}

Response Service::put_views(const std::string& id, const std::string& user, const std::string& text) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    const Json body = parse_body(text);
    UserViews uv;
    uv.user_id = user;
    Json views_json;
    if (body.is_array()) {
      views_json = body;
    } else {
      check_fields(body, {"views", "overall_confidence", "expected_revision"});
      if (!body.contains("views")) throw ParseError("body needs a views array");
      views_json = body["views"];
      if (body.contains("overall_confidence")) {
        if (!body["overall_confidence"].is_number()) throw ParseError("overall_confidence must be a number");
        uv.overall_confidence = body["overall_confidence"].get<double>();
      }
    }
    uv.views = view_document_from_json(views_json).users.front().views;

    std::lock_guard lock(s->mutex);
    if (auto r = stale(body, *s)) return *r;
    view_panel_for(uv.views, s->panel);  // every column expression must evaluate on this panel
    std::vector<UserViews> next = s->users;
    auto it = std::find_if(next.begin(), next.end(), [&](const UserViews& u) { return u.user_id == user; });
    if (it == next.end())
      next.push_back(uv);
    else
      *it = uv;
    try {
      confidence_of(next).validate();
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("invalid confidences: ") + e.what());
    }
    s->users = std::move(next);
    s->views_changed = ++s->revision;
    return {200, {{"revision", s->revision}, {"user_id", user}, {"num_views", uv.views.size()}}};
  });
}

Response Service::delete_views(const std::string& id, const std::string& user, const std::string& text) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    const Json body = parse_body(text);
    std::lock_guard lock(s->mutex);
    if (auto r = stale(body, *s)) return *r;
    auto it = std::find_if(s->users.begin(), s->users.end(), [&](const UserViews& u) { return u.user_id == user; });
    if (it == s->users.end()) return error(404, "no views for user '" + user + "'", s->revision);
    s->users.erase(it);
    s->views_changed = ++s->revision;
    return {200, {{"revision", s->revision}, {"user_id", user}, {"num_views", 0}}};
  });
}

Response Service::solve(const std::string& id, const std::string& text) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    const Json body = parse_body(text);
    check_fields(body, {"expected_revision", "tol", "max_iter"});
    SolverConfig config = options_.solver;
    if (body.contains("tol")) config.dual_tolerance = body["tol"].get<double>();
    if (body.contains("max_iter")) config.max_iterations = body["max_iter"].get<int>();
    config.validate();

    std::lock_guard lock(s->mutex);
    if (auto r = stale(body, *s)) return *r;
    ViewDocument doc{s->users};
    PooledPosterior pooled = solve_view_document(s->panel, s->prior, doc, config);
    Json diagnostics = pooled.diagnostics(s->prior);
    if (pooled.status != SolveStatus::Converged) {
      std::string offending;
      for (const auto& u : pooled.users)
        for (const auto& sub : u.subsets)
          if (sub.result && sub.result->status != SolveStatus::Converged && offending.empty()) offending = u.user_id;
      Json err = {{"error", pooled.status == SolveStatus::Infeasible ? "infeasible views" : "solver did not converge"},
                  {"status", std::string(to_string(pooled.status))},
                  {"user_id", offending},
                  {"revision", s->revision},
                  {"diagnostics", diagnostics}};
      return {422, std::move(err)};
    }
    s->solved = std::move(pooled);
    s->solved_at = ++s->revision;
    if (s->frontier) s->frontier->points.clear();
    return {200, {{"revision", s->revision}, {"diagnostics", diagnostics}}};
  });
}

Response Service::stats(const std::string& id, const std::map<std::string, std::string>& query) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    std::vector<double> levels = kDefaultQuantiles;
    if (auto it = query.find("quantiles"); it != query.end()) {
      levels.clear();
      for (const auto& t : split_list(it->second)) levels.push_back(parse_number(t, "quantile level"));
    }
    std::lock_guard lock(s->mutex);
    if (!posterior_fresh(*s)) return error(409, "posterior is stale; POST solve first", s->revision);
    std::vector<std::string> columns = s->panel.factor_names();
    if (auto it = query.find("columns"); it != query.end()) columns = split_list(it->second);
    const ViewPanel values = evaluate_view_columns(s->panel, columns);
    const ProbabilityVector& post = *s->solved->posterior;
    Json out = Json::array();
    for (std::size_t k = 0; k < values.num_columns(); ++k) {
      const Eigen::VectorXd col = values.columns.col(static_cast<Eigen::Index>(k));
      out.push_back({{"name", values.labels[k]},
                     {"prior", describe_json(col, s->prior, levels)},
                     {"posterior", describe_json(col, post, levels)}});
    }
    return {200, {{"revision", s->revision}, {"posterior_revision", s->solved_at}, {"columns", out}}};
  });
}

Response Service::histogram(const std::string& id, const std::map<std::string, std::string>& query) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    auto it = query.find("column");
    if (it == query.end() || it->second.empty()) throw ParseError("histogram needs a column parameter");
    std::size_t bins = 50;
    if (auto b = query.find("bins"); b != query.end()) {
      const double v = parse_number(b->second, "bins");
      if (v < 1 || v > 10000 || v != std::floor(v)) throw ParseError("bins must be an integer in [1, 10000]");
      bins = static_cast<std::size_t>(v);
    }
    std::lock_guard lock(s->mutex);
    if (!posterior_fresh(*s)) return error(409, "posterior is stale; POST solve first", s->revision);
    const ViewPanel values = evaluate_view_columns(s->panel, std::vector<std::string>{it->second});
    const Eigen::VectorXd col = values.columns.col(0);
    double lo = col.minCoeff();
    double hi = col.maxCoeff();
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) edges[b] = lo + width * static_cast<double>(b);
    edges.back() = hi;
    std::vector<double> prior_mass(bins, 0.0);
    std::vector<double> post_mass(bins, 0.0);
    const auto& post = s->solved->posterior->weights();
    for (Eigen::Index j = 0; j < col.size(); ++j) {
      auto b = static_cast<std::size_t>((col[j] - lo) / width);
      b = std::min(b, bins - 1);
      prior_mass[b] += s->prior.weights()[j];
      post_mass[b] += post[j];
    }
    return {200,
            {{"revision", s->revision},
             {"column", it->second},
             {"edges", edges},
             {"prior", prior_mass},
             {"posterior", post_mass}}};
  });
}

Response Service::post_frontier(const std::string& id, const std::string& text) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    const Json body = parse_body(text);
    check_fields(body, {"book", "current_prices", "gamma", "lambdas", "position_bounds", "constraints",
                        "num_variance_targets", "expected_revision"});
    std::lock_guard lock(s->mutex);
    if (auto r = stale(body, *s)) return *r;
    if (!posterior_fresh(*s)) return error(409, "posterior is stale; POST solve first", s->revision);

    std::optional<FrontierState> state = s->frontier;
    if (body.contains("book")) {
      FrontierState fresh;
      fresh.book = book_from_json(body["book"]);
      if (body.contains("current_prices")) {
        const Eigen::VectorXd prices = vector_from_json(body["current_prices"], "current_prices");
        fresh.current_prices.assign(prices.data(), prices.data() + prices.size());
      } else {
        for (const auto& c : fresh.book) fresh.current_prices.push_back(current_price(c));
      }
      fresh.pnl = build_pnl_panel(s->panel, fresh.book, fresh.current_prices);
      fresh.spec.lambdas = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 1e6};
      fresh.spec.position_bounds = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(fresh.book.size()));
      fresh.spec.constraints = zero_budget_zero_delta(fresh.book, fresh.current_prices);
      state = std::move(fresh);
    }
    if (!state) throw ParseError("no book configured for this session");
    const auto I = static_cast<Eigen::Index>(state->book.size());
    if (body.contains("gamma")) state->spec.gamma = body["gamma"].get<double>();
    if (body.contains("lambdas")) {
      const Eigen::VectorXd l = vector_from_json(body["lambdas"], "lambdas");
      state->spec.lambdas.assign(l.data(), l.data() + l.size());
    }
    if (body.contains("position_bounds")) {
      const Json& pb = body["position_bounds"];
      state->spec.position_bounds = pb.is_number() ? Eigen::VectorXd::Constant(I, pb.get<double>())
                                                   : vector_from_json(pb, "position_bounds");
    }
    if (body.contains("num_variance_targets"))
      state->spec.num_variance_targets = body["num_variance_targets"].get<std::size_t>();
    if (body.contains("constraints")) {
      const Json& c = body["constraints"];
      if (c.is_string() && c.get<std::string>() == "zero_budget_zero_delta") {
        state->spec.constraints = zero_budget_zero_delta(state->book, state->current_prices);
      } else if (c.is_string() && c.get<std::string>() == "none") {
        state->spec.constraints = LinearConstraints{};
      } else if (c.is_object()) {
        check_fields(c, {"B", "lower", "upper"});
        LinearConstraints lc;
        const Eigen::MatrixXd B = matrix_from_json(c.at("B"), "B");
        const Eigen::VectorXd lo = vector_from_json(c.at("lower"), "lower");
        const Eigen::VectorXd hi = vector_from_json(c.at("upper"), "upper");
        if (lo.size() != B.rows() || hi.size() != B.rows()) throw ParseError("constraint bounds need one entry per row");
        for (Eigen::Index r = 0; r < B.rows(); ++r) lc.add(B.row(r), lo[r], hi[r], "row" + std::to_string(r + 1));
        state->spec.constraints = std::move(lc);
      } else {
        throw ParseError("constraints must be \"zero_budget_zero_delta\", \"none\" or {B, lower, upper}");
      }
    }
    state->points = mean_cvar_frontier(state->pnl, *s->solved->posterior, state->spec);
    state->computed_at = s->solved_at;
    s->frontier = std::move(state);
    ++s->revision;
    return {200, frontier_json(*s)};
  });
}

Response Service::get_frontier(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  std::lock_guard lock(s->mutex);
  if (!s->frontier || s->frontier->points.empty()) {
    if (s->frontier) return error(409, "frontier is stale; POST frontier to recompute", s->revision);
    return error(404, "no frontier computed for this session", s->revision);
  }
  if (!posterior_fresh(*s) || s->frontier->computed_at != s->solved_at)
    return error(409, "frontier is stale; POST frontier to recompute", s->revision);
  return {200, frontier_json(*s)};
}

Response Service::snapshot(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "no session '" + id + "'");
  return guarded([&]() -> Response {
    std::lock_guard lock(s->mutex);
    Json snap = {{"panel_csv", format_panel_csv(s->panel)}, {"prior", to_json(Eigen::VectorXd(s->prior.weights()))}};
    snap["users"] = to_json(ViewDocument{s->users})["users"];
    Json out = {{"revision", s->revision}, {"snapshot", snap}};
    if (options_.snapshot_dir) {
      const auto path = *options_.snapshot_dir / (s->id + ".json");
      std::ofstream file(path);
      if (!file) return error(500, "cannot write " + path.string(), s->revision);
      file << snap.dump();
      out["path"] = path.string();
    }
    return {200, std::move(out)};
  });
}

}  // namespace epool::service
