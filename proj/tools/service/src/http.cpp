#include "epool_service/service.hpp"

#include <httplib.h>

namespace epool::service {

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::map<std::string, std::string> query_of(const httplib::Request& req) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : req.params) out[k] = v;
  return out;
}

}  // namespace

void register_routes(httplib::Server& server, Service& service) {
  const std::string sid = R"(/sessions/([A-Za-z0-9_-]+))";
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.create_session(req.body));
  });
  server.Get(sid, [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_session(req.matches[1]));
  });
  server.Put(sid + R"(/views/([A-Za-z0-9_.-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.put_views(req.matches[1], req.matches[2], req.body));
  });
  server.Delete(sid + R"(/views/([A-Za-z0-9_.-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.delete_views(req.matches[1], req.matches[2], req.body));
  });
  server.Post(sid + "/solve", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.solve(req.matches[1], req.body));
  });
  server.Get(sid + "/stats", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.stats(req.matches[1], query_of(req)));
  });
  server.Get(sid + "/histogram", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.histogram(req.matches[1], query_of(req)));
  });
  server.Post(sid + "/frontier", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_frontier(req.matches[1], req.body));
  });
  server.Get(sid + "/frontier", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_frontier(req.matches[1]));
  });
  server.Post(sid + "/snapshot", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.snapshot(req.matches[1]));
  });
}

}  // namespace epool::service
