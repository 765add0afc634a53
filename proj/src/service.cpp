#include "dairy/service.hpp"

#include <httplib.h>

#include "dairy/text.hpp"

namespace dairy {

HttpReply problem(int status, const std::string& error, const std::string& stage, const std::string& detail) {
  return {status, "application/json", dump_json(json{{"error", error}, {"stage", stage}, {"detail", detail}})};
}

struct Service::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const HttpReply& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type.c_str());
}

}  // namespace

Service::Service(Engine& engine) : engine_(engine), impl_(std::make_unique<Impl>()) {
  auto& s = impl_->server;
  // httplib's default adds SO_REUSEPORT, which lets a second server share a busy port silently
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  s.Post("/chat", [this](const httplib::Request& req, httplib::Response& res) { send(res, chat(req.body)); });
  s.Get(R"(/trace/([^/]+))",
        [this](const httplib::Request& req, httplib::Response& res) { send(res, trace(req.matches[1])); });
  s.Get("/turns", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("session")) {
      send(res, problem(400, "bad_request", "request", "query parameter session is required"));
      return;
    }
    send(res, turns(req.get_param_value("session")));
  });
  s.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  s.Get(R"(/plot/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, plot(req.matches[1], req.matches[2]));
  });
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto r = res.status == 404 ? problem(404, "not_found", "request", "no such endpoint: " + req.path)
                                     : problem(res.status, "bad_request", "request", "request rejected");
    res.set_content(r.body, r.content_type.c_str());
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown failure";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, problem(500, "internal", "service", what));
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  if (port == 0) {
    const int p = s.bind_to_any_port(host);
    if (p <= 0) throw Error("serve", "cannot bind " + host);
    return p;
  }
  if (!s.bind_to_port(host, port)) throw Error("serve", "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

HttpReply Service::chat(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return problem(400, "bad_request", "request", "body is not valid JSON");
  }
  if (!req.is_object()) return problem(400, "bad_request", "request", "body must be a JSON object");
  if (!req.contains("session") || !req["session"].is_string() || text::trim(req["session"].get<std::string>()).empty()) {
    return problem(400, "bad_request", "request", "session must be a non-empty string");
  }
  if (!req.contains("question") || !req["question"].is_string()) {
    return problem(400, "bad_request", "request", "question must be a string");
  }
  std::optional<RouteLabel> direct;
  std::string mode = "supervised";
  if (req.contains("mode") && !req["mode"].is_null()) {
    if (!req["mode"].is_string()) return problem(400, "bad_request", "request", "mode must be a string");
    mode = text::to_lower(req["mode"].get<std::string>());
    if (mode != "supervised" && mode != "direct") {
      return problem(400, "bad_request", "request", "mode must be supervised or direct");
    }
  }
  const bool has_route = req.contains("route") && !req["route"].is_null();
  if (has_route) {
    if (!req["route"].is_string()) return problem(400, "bad_request", "route", "route must be a string");
    const auto r = parse_route(req["route"].get<std::string>());
    if (!r || *r == RouteLabel::Unknown) {
      return problem(400, "unknown_route", "route", "unknown route " + req["route"].get<std::string>());
    }
    if (mode == "supervised" && req.contains("mode") && !req["mode"].is_null()) {
      return problem(400, "bad_request", "route", "route is only valid in direct mode");
    }
    direct = *r;
  } else if (mode == "direct") {
    return problem(400, "bad_request", "route", "direct mode needs a route");
  }
  try {
    auto q = UserQuery::make(req["question"].get<std::string>(), req["session"].get<std::string>());
    const auto result = engine_.handle_turn(q, direct);
    return {200, "application/json", dump_json(result.to_json())};
  } catch (const Error& e) {
    return problem(400, "bad_request", e.stage(), e.what());
  }
}

HttpReply Service::trace(const std::string& turn_id) const {
  const auto t = engine_.find_turn(turn_id);
  if (!t) return problem(404, "not_found", "trace", "no turn " + turn_id);
  return {200, "application/json",
          dump_json(json{{"turn_id", t->turn_id}, {"route", std::string(to_string(t->route))}, {"spans", t->spans}})};
}

HttpReply Service::turns(const std::string& session) const {
  json arr = json::array();
  for (const auto& t : engine_.session_turns(session)) {
    TurnResult r{t, t.answer ? t.answer->elapsed : 0.0};
    arr.push_back(r.to_json());
  }
  return {200, "application/json", dump_json(json{{"session", session}, {"turns", std::move(arr)}})};
}

HttpReply Service::health() const {
  return {200, "application/json",
          dump_json(json{{"status", "ok"}, {"model_endpoint", engine_.model_description()}})};
}

HttpReply Service::plot(const std::string& turn_id, const std::string& attachment_id) const {
  const auto t = engine_.find_turn(turn_id);
  if (!t || !t->answer) return problem(404, "not_found", "plot", "no turn " + turn_id);
  for (const auto& a : t->answer->attachments) {
    if (a.id == attachment_id && a.kind == Attachment::Kind::Svg && a.payload.is_string()) {
      return {200, "image/svg+xml", a.payload.get<std::string>()};
    }
  }
  return problem(404, "not_found", "plot", "turn " + turn_id + " has no plot " + attachment_id);
}

}  // namespace dairy
