#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dairy/core.hpp"

namespace dairy {

struct ChatMessage {
  enum class Role { System, User, Assistant };
  Role role = Role::User;
  std::string content;
};

std::string_view to_string(ChatMessage::Role r);

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 512;
  std::string model_name;
  // Pipeline step issuing the call ("supervisor", "generate_sql", ...). Not sent on the wire;
  // mock scripts may key on it.
  std::string purpose;

  void validate() const;
  const ChatMessage* last_user() const;
  json to_wire() const;
};

struct ChatResponse {
  std::string raw_text;
  std::string clean_text;
  double latency = 0.0;
};

struct ReasoningDelimiters {
  std::string open = "<think>";
  std::string close = "</think>";
};

// Removes every well-formed reasoning block; an unclosed opener swallows the rest.
std::string strip_reasoning(std::string_view raw, const ReasoningDelimiters& delims = {});

class ExtractionError : public Error {
 public:
  ExtractionError(std::string clean_text, std::string_view language_tag);
  const std::string& clean_text() const { return clean_text_; }

 private:
  std::string clean_text_;
};

// Fenced block tagged `language_tag`, else the first untagged fence, else `clean` itself when
// it opens with a statement keyword for that language ("SELECT"/"WITH" for sql, an assignment
// from `df` for the dataframe DSL, "{" for json).
std::string extract_code_block(std::string_view clean, std::string_view language_tag);

class GatewayError : public Error {
 public:
  enum class Kind { Transport, Timeout, Protocol, Scripting };
  GatewayError(Kind kind, const std::string& what) : Error("gateway", what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Returns the raw assistant text. Throws GatewayError.
  virtual std::string send(const ChatRequest& req) = 0;
  virtual std::string describe() const = 0;
};

struct HttpEndpoint {
  std::string base_url = "http://127.0.0.1:8080";  // scheme://host:port
  std::string path = "/v1/chat/completions";
  double timeout_s = 120.0;
  std::string api_key;  // optional bearer token
};

// Standard chat-completions protocol: POST {model, messages, temperature, max_tokens},
// read choices[0].message.content.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint);
  std::string send(const ChatRequest& req) override;
  std::string describe() const override { return endpoint_.base_url + endpoint_.path; }

 private:
  HttpEndpoint endpoint_;
};

struct MockEntry {
  std::string match;    // substring of the last user message (substring mode)
  std::string purpose;  // optional: restrict to requests with this purpose
  std::string response;
  std::string fault;    // "", "timeout" or "transport": raise instead of answering
};

struct MockScript {
  enum class Mode { Sequence, Substring };
  Mode mode = Mode::Substring;
  std::vector<MockEntry> entries;

  // Accepts either a bare array of {match, response[, purpose][, fault]} (substring mode) or
  // {"mode": "sequence"|"substring", "entries": [...]}.
  static MockScript from_json(const json& j);
  static MockScript load(const std::filesystem::path& path);
};

// Deterministic scripted backend. Sequence mode serves entries in order; substring mode picks
// the entry whose `match` is the longest substring of the last user message.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(MockScript script);
  std::string send(const ChatRequest& req) override;
  std::string describe() const override { return "mock"; }

  std::size_t consumed() const;

 private:
  MockScript script_;
  mutable std::mutex mu_;
  std::size_t cursor_ = 0;
  std::size_t served_ = 0;
};

struct GatewayOptions {
  ReasoningDelimiters delimiters;
  std::size_t pool_size = 1;
};

// The one shared model access point. Outbound calls are admitted FIFO, at most `pool_size`
// in flight.
class ModelGateway {
 public:
  ModelGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options = {});

  ChatResponse complete(const ChatRequest& req);
  std::string describe() const { return backend_->describe(); }
  std::uint64_t calls() const;

 private:
  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;  // tickets below this have been admitted
  std::size_t in_flight_ = 0;
  std::uint64_t calls_ = 0;
};

// Convenience: system + user message request.
ChatRequest make_request(std::string purpose, std::string system_prompt, std::string user_prompt,
                         const std::string& model_name, double temperature, int max_tokens);

}  // namespace dairy
