#include <httplib.h>

#include "elicit/survey.hpp"

namespace elicit::survey {

using nlohmann::json;

namespace {

const char* title_for(int status) {
  switch (status) {
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 409: return "Conflict";
    case 422: return "Unprocessable Entity";
    default: return "Internal Server Error";
  }
}

void send_problem(httplib::Response& res, int status, const std::string& code, const std::string& detail) {
  const json problem{{"type", "about:blank"},
                     {"title", title_for(status)},
                     {"status", status},
                     {"code", code},
                     {"detail", detail}};
  res.status = status;
  res.set_content(problem.dump(), "application/problem+json");
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  auto body = json::parse(req.body);  // json::parse_error handled by the wrapper
  if (!body.is_object()) throw ServiceError(400, "invalid_request", "request body must be a JSON object");
  return body;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ServiceError& e) {
      send_problem(res, e.status(), e.code(), e.what());
    } catch (const json::parse_error& e) {
      send_problem(res, 400, "malformed_json", e.what());
    } catch (const json::exception& e) {
      send_problem(res, 400, "invalid_request", e.what());
    } catch (const std::exception& e) {
      send_problem(res, 500, "internal_error", e.what());
    }
  };
}

bool authorized(const httplib::Request& req, const std::string& token) {
  if (req.has_header("X-Admin-Token") && req.get_header_value("X-Admin-Token") == token) return true;
  return req.has_header("Authorization") && req.get_header_value("Authorization") == "Bearer " + token;
}

}  // namespace

struct SurveyServer::Impl {
  SurveyStore& store;
  ServerConfig config;
  httplib::Server server;

  Impl(SurveyStore& s, ServerConfig c) : store(s), config(std::move(c)) { mount(); }

  void mount() {
    server.Get("/scenario", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, 200, scenario_to_json(store.scenario()));
               }));

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  send_json(res, 201, to_json(store.create_session(body.at("expert_id").get<std::string>())));
                }));

    server.Post(R"(/sessions/([^/]+)/ranking)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  const auto& ranks_json = body.at("ranks");
                  std::map<std::string, int> ranks;
                  for (const auto& [av, r] : ranks_json.items()) {
                    if (!r.is_number_integer()) {
                      throw ServiceError(422, "not_permutation", "rank of '" + av + "' is not an integer");
                    }
                    ranks.emplace(av, r.get<int>());
                  }
                  send_json(res, 200, to_json(store.submit_ranking(req.matches[1], ranks)));
                }));

    server.Post(R"(/sessions/([^/]+)/responses)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  const auto& lo = body.at("lo");
                  const auto& hi = body.at("hi");
                  if (!lo.is_number() || !hi.is_number()) {
                    throw ServiceError(422, "out_of_range", "lo and hi must be numbers");
                  }
                  send_json(res, 200,
                            to_json(store.submit_interval(req.matches[1], body.at("hop_id").get<std::string>(),
                                                          body.at("question_id").get<std::string>(),
                                                          lo.get<double>(), hi.get<double>())));
                }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, to_json(store.get_session(req.matches[1])));
               }));

    server.Get("/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 if (config.admin_token.empty()) {
                   throw ServiceError(403, "export_disabled", "no admin token is configured");
                 }
                 if (!authorized(req, config.admin_token)) {
                   throw ServiceError(401, "unauthorized", "admin token required");
                 }
                 const auto partial = req.get_param_value("include_partial");
                 const auto ds = store.export_dataset(partial == "1" || partial == "true");
                 send_json(res, 200, responses_to_json(ds.experts, ds.rankings, ds.responses));
               }));
  }
};

SurveyServer::SurveyServer(SurveyStore& store, ServerConfig config)
    : impl_(std::make_unique<Impl>(store, std::move(config))) {}

SurveyServer::~SurveyServer() = default;

bool SurveyServer::listen() { return impl_->server.listen(impl_->config.host, impl_->config.port); }

int SurveyServer::bind_any_port() { return impl_->server.bind_to_any_port(impl_->config.host); }

void SurveyServer::serve() { impl_->server.listen_after_bind(); }

void SurveyServer::stop() { impl_->server.stop(); }

void SurveyServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace elicit::survey
