#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "epool/frontier.hpp"
#include "epool/json_io.hpp"
#include "epool/pipeline.hpp"
#include "epool/scenario.hpp"

namespace httplib {
class Server;
}

namespace epool::service {

/// HTTP-style result of an API call.
struct Response {
  int status = 200;
  Json body;
};

struct FrontierState {
  std::vector<ButterflyContract> book;
  std::vector<double> current_prices;
  FrontierSpec spec;
  PricePanel pnl;  ///< priced once per book; posterior updates never touch it
  std::vector<FrontierPoint> points;
  std::uint64_t computed_at = 0;  ///< revision of the posterior the points were computed under
};

/// In-memory analysis session. Every mutation bumps `revision`.
struct Session {
  std::string id;
  std::mutex mutex;
  std::uint64_t revision = 1;
  ScenarioPanel panel;
  ProbabilityVector prior;
  std::vector<UserViews> users;  ///< insertion order
  std::optional<PooledPosterior> solved;
  std::uint64_t solved_at = 0;      ///< revision stamped by the last successful solve
  std::uint64_t views_changed = 1;  ///< revision of the last view mutation
  std::optional<FrontierState> frontier;

  Session(std::string session_id, ScenarioPanel p, ProbabilityVector q)
      : id(std::move(session_id)), panel(std::move(p)), prior(std::move(q)) {}
};

struct ServiceOptions {
  std::optional<std::filesystem::path> snapshot_dir;
  SolverConfig solver;
};

/// Session store and request handlers, independent of the transport.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  Response create_session(const std::string& body);
  Response get_session(const std::string& id);
  Response put_views(const std::string& id, const std::string& user, const std::string& body);
  Response delete_views(const std::string& id, const std::string& user, const std::string& body);
  Response solve(const std::string& id, const std::string& body);
  Response stats(const std::string& id, const std::map<std::string, std::string>& query);
  Response histogram(const std::string& id, const std::map<std::string, std::string>& query);
  Response post_frontier(const std::string& id, const std::string& body);
  Response get_frontier(const std::string& id);
  Response snapshot(const std::string& id);

  std::size_t num_sessions() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  ServiceOptions options_;
  mutable std::shared_mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

/// Routes:
///   POST   /sessions
///   GET    /sessions/{id}
///   PUT    /sessions/{id}/views/{user}
///   DELETE /sessions/{id}/views/{user}
///   POST   /sessions/{id}/solve
///   GET    /sessions/{id}/stats
///   GET    /sessions/{id}/histogram?column=&bins=
///   POST   /sessions/{id}/frontier
///   GET    /sessions/{id}/frontier
///   POST   /sessions/{id}/snapshot
void register_routes(httplib::Server& server, Service& service);

}  // namespace epool::service
