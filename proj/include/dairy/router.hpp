#pragma once

#include <string>
#include <string_view>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/gateway.hpp"

namespace dairy {

struct RouteDecision {
  RouteLabel label = RouteLabel::Clarify;
  std::string raw_model_output;
  bool fallback_applied = false;
};

// Exact label match after trim+lowercase, then substring match in the fixed priority order
// clarify, model, nosql, sql, text. Anything else falls back to CLARIFY.
RouteDecision parse_route_decision(std::string_view model_output);

// The supervisor agent.
class Router {
 public:
  Router(ModelGateway& gateway, const SystemConfig& config);

  // One gateway call. Never returns UNKNOWN; gateway errors propagate.
  RouteDecision classify(const UserQuery& query) const;

 private:
  ModelGateway& gateway_;
  const SystemConfig& config_;
};

// The intention-validation subagent's fixed reply.
AgentAnswer clarify_response();
const std::string& clarify_template();

}  // namespace dairy
