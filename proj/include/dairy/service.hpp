#pragma once

#include <memory>
#include <string>

#include "dairy/engine.hpp"

namespace dairy {

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// HTTP JSON API over an Engine.
//
//   POST /chat   {session, question, mode?: "supervised"|"direct", route?}  -> TurnResult
//   GET  /trace/{turn_id}                     -> {turn_id, route, spans}
//   GET  /turns?session={id}                  -> {session, turns: [TurnResult]}
//   GET  /health                              -> {status, model_endpoint}
//   GET  /plot/{turn_id}/{attachment_id}      -> image/svg+xml
//
// Errors are problem documents {error, stage, detail} with a 4xx status.
class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds without serving yet; port 0 picks a free port. Returns the bound port, throws
  // Error("serve") when the port cannot be bound.
  int bind(const std::string& host, int port);
  void run();  // blocks until stop()
  void wait_until_ready() const;  // returns once run() accepts connections
  void stop();

  // Request handlers, callable without a socket.
  HttpReply chat(const std::string& body);
  HttpReply trace(const std::string& turn_id) const;
  HttpReply turns(const std::string& session) const;
  HttpReply health() const;
  HttpReply plot(const std::string& turn_id, const std::string& attachment_id) const;

 private:
  struct Impl;
  Engine& engine_;
  std::unique_ptr<Impl> impl_;
};

HttpReply problem(int status, const std::string& error, const std::string& stage, const std::string& detail);

}  // namespace dairy
