#include "dairy/router.hpp"

#include <array>

#include "dairy/text.hpp"

namespace dairy {

namespace {
constexpr std::array kPriority = {RouteLabel::Clarify, RouteLabel::Model, RouteLabel::NoSql, RouteLabel::Sql,
                                  RouteLabel::Text};
}  // namespace

RouteDecision parse_route_decision(std::string_view model_output) {
  RouteDecision d;
  d.raw_model_output = std::string(model_output);
  const std::string norm = text::to_lower(text::trim(model_output));
  for (RouteLabel l : kPriority) {
    if (norm == subagent_name(l)) {
      d.label = l;
      return d;
    }
  }
  for (RouteLabel l : kPriority) {
    if (norm.find(subagent_name(l)) != std::string::npos) {
      d.label = l;
      return d;
    }
  }
  d.label = RouteLabel::Clarify;
  d.fallback_applied = true;
  return d;
}

Router::Router(ModelGateway& gateway, const SystemConfig& config) : gateway_(gateway), config_(config) {}

RouteDecision Router::classify(const UserQuery& query) const {
  const auto prompt = text::render(config_.prompts.supervisor, {{"question", query.text}});
  auto req = make_request("supervisor", config_.prompts.system, prompt, config_.model_name, config_.temperature,
                          config_.max_tokens);
  const auto resp = gateway_.complete(req);
  return parse_route_decision(resp.clean_text);
}

const std::string& clarify_template() {
  static const std::string kTemplate = PromptSet::defaults().clarify;
  return kTemplate;
}

AgentAnswer clarify_response() {
  AgentAnswer a;
  a.body = clarify_template();
  a.route = RouteLabel::Clarify;
  return a;
}

}  // namespace dairy
