#include "dairy/gateway.hpp"

#include <chrono>
#include <fstream>
#include <regex>

#include <httplib.h>

#include "dairy/text.hpp"

namespace dairy {

std::string_view to_string(ChatMessage::Role r) {
  switch (r) {
    case ChatMessage::Role::System: return "system";
    case ChatMessage::Role::User: return "user";
    case ChatMessage::Role::Assistant: return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw ValidationError("chat request has no messages");
  if (messages.front().role == ChatMessage::Role::Assistant) {
    throw ValidationError("first chat message must be system or user");
  }
  if (temperature < 0) throw ValidationError("temperature must be >= 0");
  if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
}

const ChatMessage* ChatRequest::last_user() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == ChatMessage::Role::User) return &*it;
  }
  return nullptr;
}

json ChatRequest::to_wire() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return json{{"model", model_name},
              {"messages", msgs},
              {"temperature", temperature},
              {"max_tokens", max_tokens},
              {"stream", false}};
}

namespace {

std::string strip_once(std::string_view raw, const ReasoningDelimiters& delims) {
  std::string out;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const auto open = raw.find(delims.open, pos);
    if (open == std::string_view::npos) {
      out.append(raw.substr(pos));
      break;
    }
    out.append(raw.substr(pos, open - pos));
    const auto close = raw.find(delims.close, open + delims.open.size());
    if (close == std::string_view::npos) break;  // unterminated: drop to end
    pos = close + delims.close.size();
  }
  return out;
}

}  // namespace

std::string strip_reasoning(std::string_view raw, const ReasoningDelimiters& delims) {
  if (delims.open.empty() || delims.close.empty()) return text::trim(raw);
  // Removing a block can splice a new delimiter together ("<thi<think>.</think>nk>"), so
  // repeat until nothing changes.
  std::string cur(raw);
  while (true) {
    std::string next = strip_once(cur, delims);
    if (next == cur) break;
    cur = std::move(next);
  }
  return text::trim(cur);
}

ExtractionError::ExtractionError(std::string clean_text, std::string_view language_tag)
    : Error("extract_code", "no " + std::string(language_tag) + " code found in model output"),
      clean_text_(std::move(clean_text)) {}

namespace {

struct Fence {
  std::string tag;
  std::string body;
};

std::vector<Fence> find_fences(std::string_view s) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find("```", pos);
    if (open == std::string_view::npos) break;
    auto eol = s.find('\n', open + 3);
    std::string_view info = eol == std::string_view::npos ? s.substr(open + 3) : s.substr(open + 3, eol - open - 3);
    std::size_t body_start = eol == std::string_view::npos ? s.size() : eol + 1;
    // "```SELECT 1```" on one line: the info string is the body
    const auto inline_close = info.find("```");
    if (inline_close != std::string_view::npos) {
      out.push_back({"", text::trim(info.substr(0, inline_close))});
      pos = open + 3 + inline_close + 3;
      continue;
    }
    const auto close = s.find("```", body_start);
    std::string_view body = close == std::string_view::npos ? s.substr(body_start) : s.substr(body_start, close - body_start);
    out.push_back({text::to_lower(text::trim(info)), text::trim(body)});
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return out;
}

std::vector<std::string> tag_aliases(std::string_view tag) {
  const std::string t = text::to_lower(tag);
  if (t == "dsl") return {"dsl", "python", "pyspark", "py"};
  if (t == "sql") return {"sql", "sqlite"};
  return {t};
}

bool begins_with_statement(std::string_view clean, std::string_view tag) {
  const std::string t = text::to_lower(tag);
  if (t == "sql") {
    static const std::regex kw(R"(^\s*(select|with)\b)", std::regex::icase);
    return std::regex_search(std::string(clean), kw);
  }
  if (t == "dsl") {
    static const std::regex kw(R"(^\s*[A-Za-z_]\w*\s*=\s*df\b)");
    return std::regex_search(std::string(clean), kw);
  }
  if (t == "json") {
    const auto c = text::trim(clean);
    return !c.empty() && (c.front() == '{' || c.front() == '[');
  }
  return false;
}

}  // namespace

std::string extract_code_block(std::string_view clean, std::string_view language_tag) {
  const auto fences = find_fences(clean);
  const auto aliases = tag_aliases(language_tag);
  auto usable = [](const std::string& body) { return !body.empty() && body.find("```") == std::string::npos; };
  for (const auto& a : aliases) {
    for (const auto& f : fences) {
      if (f.tag == a && usable(f.body)) return f.body;
    }
  }
  for (const auto& f : fences) {
    if (f.tag.empty() && usable(f.body)) return f.body;
  }
  if (begins_with_statement(clean, language_tag)) {
    std::string body = text::trim(clean);
    if (usable(body)) return body;
  }
  throw ExtractionError(std::string(clean), language_tag);
}

// ---- HTTP backend ----

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpChatBackend::send(const ChatRequest& req) {
  httplib::Client cli(endpoint_.base_url);
  if (!cli.is_valid()) {
    throw GatewayError(GatewayError::Kind::Transport, "invalid model endpoint address " + endpoint_.base_url);
  }
  const auto secs = std::chrono::duration<double>(endpoint_.timeout_s);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(secs);
  cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(std::min(secs, std::chrono::duration<double>(10.0))));
  cli.set_read_timeout(usec);
  cli.set_write_timeout(usec);
  if (!endpoint_.api_key.empty()) cli.set_bearer_token_auth(endpoint_.api_key);

  auto res = cli.Post(endpoint_.path, req.to_wire().dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto kind = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
                          ? GatewayError::Kind::Timeout
                          : GatewayError::Kind::Transport;
    throw GatewayError(kind, "model endpoint " + describe() + " failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw GatewayError(GatewayError::Kind::Protocol,
                       "model endpoint " + describe() + " returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto body = json::parse(res->body);
    const auto& content = body.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw GatewayError(GatewayError::Kind::Protocol,
                       "model endpoint " + describe() + " sent an unexpected body: " + e.what());
  }
}

// ---- mock backend ----

MockScript MockScript::from_json(const json& j) {
  MockScript s;
  const json* entries = &j;
  if (j.is_object()) {
    const auto mode = j.value("mode", std::string("substring"));
    if (mode == "sequence") s.mode = Mode::Sequence;
    else if (mode == "substring") s.mode = Mode::Substring;
    else throw ConfigError("unknown mock mode " + mode);
    entries = &j.at("entries");
  }
  if (!entries->is_array()) throw ConfigError("mock script must be an array of {match, response}");
  for (const auto& e : *entries) {
    MockEntry m;
    m.match = e.value("match", std::string());
    m.purpose = e.value("purpose", std::string());
    m.response = e.value("response", std::string());
    m.fault = e.value("fault", std::string());
    if (!m.fault.empty() && m.fault != "timeout" && m.fault != "transport") {
      throw ConfigError("unknown mock fault " + m.fault);
    }
    s.entries.push_back(std::move(m));
  }
  return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock script " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("mock script " + path.string() + " is not valid JSON: " + e.what());
  }
}

MockChatBackend::MockChatBackend(MockScript script) : script_(std::move(script)) {}

std::size_t MockChatBackend::consumed() const {
  std::lock_guard lk(mu_);
  return served_;
}

std::string MockChatBackend::send(const ChatRequest& req) {
  std::lock_guard lk(mu_);
  const ChatMessage* user = req.last_user();
  const std::string prompt = user ? user->content : std::string();
  const MockEntry* hit = nullptr;

  if (script_.mode == MockScript::Mode::Sequence) {
    if (cursor_ >= script_.entries.size()) {
      throw GatewayError(GatewayError::Kind::Scripting, "mock script exhausted at prompt: " + prompt);
    }
    hit = &script_.entries[cursor_++];
  } else {
    std::size_t best_len = 0;
    bool ambiguous = false;
    for (const auto& e : script_.entries) {
      if (!e.purpose.empty() && e.purpose != req.purpose) continue;
      if (prompt.find(e.match) == std::string::npos) continue;
      if (!hit || e.match.size() > best_len) {
        hit = &e;
        best_len = e.match.size();
        ambiguous = false;
      } else if (e.match.size() == best_len && (e.response != hit->response || e.fault != hit->fault)) {
        ambiguous = true;
      }
    }
    if (!hit) {
      throw GatewayError(GatewayError::Kind::Scripting,
                         "no mock entry matches " + (req.purpose.empty() ? std::string() : req.purpose + " ") +
                             "prompt: " + prompt);
    }
    if (ambiguous) {
      throw GatewayError(GatewayError::Kind::Scripting, "ambiguous mock entries for prompt: " + prompt);
    }
  }
  ++served_;
  if (hit->fault == "timeout") {
    throw GatewayError(GatewayError::Kind::Timeout, "model endpoint mock timed out");
  }
  if (hit->fault == "transport") {
    throw GatewayError(GatewayError::Kind::Transport, "model endpoint mock unreachable");
  }
  return hit->response;
}

// ---- gateway ----

ModelGateway::ModelGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw ConfigError("model gateway needs a backend");
  if (options_.pool_size == 0) options_.pool_size = 1;
}

std::uint64_t ModelGateway::calls() const {
  std::lock_guard lk(mu_);
  return calls_;
}

ChatResponse ModelGateway::complete(const ChatRequest& req) {
  req.validate();
  {
    std::unique_lock lk(mu_);
    const auto ticket = next_ticket_++;
    cv_.wait(lk, [&] { return serving_ == ticket && in_flight_ < options_.pool_size; });
    ++serving_;
    ++in_flight_;
    ++calls_;
  }
  cv_.notify_all();

  struct Release {
    ModelGateway& g;
    ~Release() {
      {
        std::lock_guard lk(g.mu_);
        --g.in_flight_;
      }
      g.cv_.notify_all();
    }
  } release{*this};

  const auto t0 = std::chrono::steady_clock::now();
  ChatResponse resp;
  resp.raw_text = backend_->send(req);
  resp.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  resp.clean_text = strip_reasoning(resp.raw_text, options_.delimiters);
  return resp;
}

ChatRequest make_request(std::string purpose, std::string system_prompt, std::string user_prompt,
                         const std::string& model_name, double temperature, int max_tokens) {
  ChatRequest r;
  if (!system_prompt.empty()) r.messages.push_back({ChatMessage::Role::System, std::move(system_prompt)});
  r.messages.push_back({ChatMessage::Role::User, std::move(user_prompt)});
  r.model_name = model_name;
  r.temperature = temperature;
  r.max_tokens = max_tokens;
  r.purpose = std::move(purpose);
  return r;
}

}  // namespace dairy
