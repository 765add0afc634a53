#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dairy/core.hpp"

namespace dairy {

// Prompt templates. Placeholders in braces are filled per call: {question}, {schema},
// {columns}, {context}, {answer}, {result}, {error}, {source}.
struct PromptSet {
  std::string supervisor;
  std::string text_answer;
  std::string text_grade;
  std::string web_answer;
  std::string sql_generate;
  std::string sql_phrase;
  std::string nosql_generate;
  std::string nosql_repair;
  std::string nosql_phrase;
  std::string model_extract;
  std::string model_repair;
  std::string clarify;
  std::string system;  // shared system message

  static PromptSet defaults();
  // Template used for the route's main generation step; throws for UNKNOWN.
  const std::string& for_route(RouteLabel label) const;
};

struct ModelEntry {
  std::string name;
  std::string backend = "http";  // "http" or "mock"
  std::string endpoint;          // http backend: base URL
  std::string model_name;        // sent as "model" on the wire
  std::filesystem::path mock_script;
};

struct SystemConfig {
  std::string model_endpoint = "http://127.0.0.1:8080";
  std::string chat_path = "/v1/chat/completions";
  std::string model_name = "local-model";
  std::string default_model;  // registry entry used by `ask`/`serve`; empty: the live endpoint
  double temperature = 0.0;
  int max_tokens = 512;
  double timeout_s = 120.0;
  std::size_t gateway_pool_size = 1;
  std::string reasoning_open = "<think>";
  std::string reasoning_close = "</think>";

  std::filesystem::path sql_store = "var/milk_data.sqlite";
  std::filesystem::path sql_csv = "data/fixtures/milk_records.csv";
  std::filesystem::path nosql_documents = "data/fixtures/herd_documents.json";
  std::filesystem::path corpus = "data/fixtures/abstracts.jsonl";
  std::filesystem::path milkbot_params = "data/milkbot_params.json";
  std::filesystem::path trace_dir = "var/traces";
  std::filesystem::path eval_dir = "data/eval";

  std::string web_provider = "fixture";  // "fixture" or "http"
  std::filesystem::path web_fixture = "data/fixtures/web_results.json";
  std::string web_url_template;  // http provider, "{query}" is URL-encoded

  std::string embedder = "hashing";  // "hashing" or "remote"
  std::string embedding_endpoint;
  std::string embedding_model;

  std::size_t row_display_cap = 20;
  std::size_t top_k = 5;
  double curve_band = 0.0;  // optional +/- fraction band on plots; 0 disables

  std::string host = "127.0.0.1";
  int port = 8765;

  PromptSet prompts = PromptSet::defaults();
  std::vector<ModelEntry> models;

  void validate() const;
  const ModelEntry* find_model(const std::string& name) const;

  // Relative paths resolve against `base`.
  static SystemConfig from_json(const json& j, const std::filesystem::path& base);
  // Reads the file, then applies environment overrides (DAIRY_MODEL_ENDPOINT, DAIRY_MODEL_NAME).
  static SystemConfig load(const std::filesystem::path& path);
  // Defaults rooted at `base`, with the same environment overrides.
  static SystemConfig defaults(const std::filesystem::path& base);
  void apply_env();
};

}  // namespace dairy
