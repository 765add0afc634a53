#include "dairy/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dairy {

namespace {

constexpr const char* kClarifyTemplate =
    "Not sure what your intention is. Could you clarify if you are looking for general dairy knowledge "
    "and practices, details from your own farm's records, or predictions about herd performance or "
    "industry trends? Please also note that this chatbot is not designed to provide unethical or "
    "harmful responses.";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

}  // namespace

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.system = "You are a helpful assistant for dairy farmers and dairy scientists.";
  p.supervisor =
      "You are the supervisor of an on-farm dairy decision-support system. Route the farmer's question "
      "to exactly one subagent and reply with the subagent name only.\n\n"
      "text_subagent: dairy science knowledge, published literature, current events and facts from the web.\n"
      "sql_subagent: the farm's own test-day production records (cows, herds, milk yield, fat, protein, "
      "somatic cell count, lactation number).\n"
      "nosql_subagent: the farm's event records held by the data service provider (event types, herds, "
      "parities, milk recordings). Provider names such as Bovicom or MMMoOogle only point to this source.\n"
      "model_subagent: predicted milk yield, lactation curves and expected production by region, parity "
      "and days in milk (DIM).\n"
      "clarify_subagent: unclear intent, out-of-scope, inappropriate or unethical requests.\n\n"
      "Question: {question}\nSubagent:";
  p.text_answer =
      "Answer the question using only the journal abstracts below. Cite nothing that is not listed. "
      "If the abstracts do not contain the answer, reply exactly \"I don't know.\"\n\n"
      "Abstracts:\n{context}\n\nQuestion: {question}";
  p.web_answer =
      "Answer the question using only the web search results below. If they do not contain the answer, "
      "reply exactly \"I don't know.\"\n\nResults:\n{context}\n\nQuestion: {question}";
  p.text_grade =
      "Decide whether the answer adequately addresses the question using the {source}. Reply with "
      "yes or no only.\n\nQuestion: {question}\nAnswer: {answer}\nAdequate:";
  p.sql_generate =
      "Write one SQLite SELECT statement that answers the question over the table below. Return only "
      "the SQL.\n\n{schema}\n\nQuestion: {question}";
  p.sql_phrase =
      "State the query result for the farmer in one or two plain sentences. Do not invent numbers.\n\n"
      "SQL: {code}\nResult:\n{result}\n\nQuestion: {question}";
  p.nosql_generate =
      "Write one line of dataframe code over the event table `df` that answers the question.\n"
      "Allowed steps: .select(\"Col\", ...), .filter(\"Col\" > 2 & \"Col2\" == \"x\"), .distinct(), "
      ".groupBy(\"Col\").agg(avg|sum|min|max|count(\"Col\")), .count(), .avg(\"Col\"), "
      ".orderBy(\"Col\", ascending=False), .limit(n).\n"
      "Form: result = df.<step>.<step>...\nColumns: {columns}\n\nQuestion: {question}";
  p.nosql_repair =
      "Your previous dataframe code was rejected.\nCode: {code}\nError: {error}\n"
      "Return corrected code using only the allowed steps.\nColumns: {columns}\n\nQuestion: {question}";
  p.nosql_phrase =
      "State the result for the farmer in one or two plain sentences. Do not invent values.\n\n"
      "Code: {code}\nResult:\n{result}\n\nQuestion: {question}";
  p.model_extract =
      "Extract lactation model inputs from the question as a JSON object with keys \"region\" (list of "
      "region codes such as US, EU), \"parity\" (list of integers) and \"dim_range\" (list of days in milk, "
      "or [start, end]). Leave out keys the question does not mention. Return only JSON.\n\n"
      "Question: {question}";
  p.model_repair =
      "Your previous output was not valid parameter JSON.\nOutput: {code}\nError: {error}\n"
      "Return only the JSON object.\n\nQuestion: {question}";
  p.clarify = kClarifyTemplate;
  return p;
}

const std::string& PromptSet::for_route(RouteLabel label) const {
  switch (label) {
    case RouteLabel::Text: return text_answer;
    case RouteLabel::Sql: return sql_generate;
    case RouteLabel::NoSql: return nosql_generate;
    case RouteLabel::Model: return model_extract;
    case RouteLabel::Clarify: return clarify;
    case RouteLabel::Unknown: break;
  }
  throw ConfigError("UNKNOWN has no prompt template");
}

void SystemConfig::validate() const {
  if (row_display_cap < 1) throw ConfigError("row_display_cap must be >= 1");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (temperature < 0) throw ConfigError("temperature must be >= 0");
  if (timeout_s <= 0) throw ConfigError("timeout_s must be positive");
  if (curve_band < 0 || curve_band >= 1) throw ConfigError("curve_band must be in [0, 1)");
  for (RouteLabel l : {RouteLabel::Text, RouteLabel::Sql, RouteLabel::NoSql, RouteLabel::Model, RouteLabel::Clarify}) {
    if (prompts.for_route(l).empty()) {
      throw ConfigError("missing prompt template for route " + std::string(to_string(l)));
    }
  }
  if (prompts.supervisor.find("{question}") == std::string::npos) {
    throw ConfigError("supervisor prompt needs a {question} placeholder");
  }
  if (web_provider != "fixture" && web_provider != "http") throw ConfigError("unknown web_provider " + web_provider);
  if (web_provider == "http" && web_url_template.empty()) throw ConfigError("http web provider needs web_url_template");
  if (embedder != "hashing" && embedder != "remote") throw ConfigError("unknown embedder " + embedder);
  if (!default_model.empty() && !find_model(default_model)) {
    throw ConfigError("default_model " + default_model + " is not in the model registry");
  }
}

const ModelEntry* SystemConfig::find_model(const std::string& name) const {
  for (const auto& m : models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

void SystemConfig::apply_env() {
  if (const char* e = std::getenv("DAIRY_MODEL_ENDPOINT"); e && *e) {
    model_endpoint = e;
    for (auto& m : models) {
      if (m.backend == "http") m.endpoint = e;
    }
  }
  if (const char* e = std::getenv("DAIRY_MODEL_NAME"); e && *e) model_name = e;
}

SystemConfig SystemConfig::defaults(const std::filesystem::path& base) {
  auto c = from_json(json::object(), base);
  c.apply_env();
  return c;
}

SystemConfig SystemConfig::from_json(const json& j, const std::filesystem::path& base) {
  SystemConfig c;
  try {
    c.model_endpoint = j.value("model_endpoint", c.model_endpoint);
    c.chat_path = j.value("chat_path", c.chat_path);
    c.model_name = j.value("model_name", c.model_name);
    c.default_model = j.value("default_model", c.default_model);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.gateway_pool_size = j.value("gateway_pool_size", c.gateway_pool_size);
    c.reasoning_open = j.value("reasoning_open", c.reasoning_open);
    c.reasoning_close = j.value("reasoning_close", c.reasoning_close);
    auto path = [&](const char* key, const std::filesystem::path& def) {
      return resolve(base, j.contains(key) ? std::filesystem::path(j.at(key).get<std::string>()) : def);
    };
    c.sql_store = path("sql_store", c.sql_store);
    c.sql_csv = path("sql_csv", c.sql_csv);
    c.nosql_documents = path("nosql_documents", c.nosql_documents);
    c.corpus = path("corpus", c.corpus);
    c.milkbot_params = path("milkbot_params", c.milkbot_params);
    c.trace_dir = path("trace_dir", c.trace_dir);
    c.eval_dir = path("eval_dir", c.eval_dir);
    c.web_provider = j.value("web_provider", c.web_provider);
    c.web_fixture = path("web_fixture", c.web_fixture);
    c.web_url_template = j.value("web_url_template", c.web_url_template);
    c.embedder = j.value("embedder", c.embedder);
    c.embedding_endpoint = j.value("embedding_endpoint", c.embedding_endpoint);
    c.embedding_model = j.value("embedding_model", c.embedding_model);
    c.row_display_cap = j.value("row_display_cap", c.row_display_cap);
    c.top_k = j.value("top_k", c.top_k);
    c.curve_band = j.value("curve_band", c.curve_band);
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);

    if (j.contains("prompts")) {
      const auto& p = j.at("prompts");
      auto set = [&](const char* key, std::string& field) {
        field = p.value(key, field);
        const std::string file_key = std::string(key) + "_file";
        if (p.contains(file_key)) field = read_file(resolve(base, p.at(file_key).get<std::string>()));
      };
      set("system", c.prompts.system);
      set("supervisor", c.prompts.supervisor);
      set("text_answer", c.prompts.text_answer);
      set("text_grade", c.prompts.text_grade);
      set("web_answer", c.prompts.web_answer);
      set("sql_generate", c.prompts.sql_generate);
      set("sql_phrase", c.prompts.sql_phrase);
      set("nosql_generate", c.prompts.nosql_generate);
      set("nosql_repair", c.prompts.nosql_repair);
      set("nosql_phrase", c.prompts.nosql_phrase);
      set("model_extract", c.prompts.model_extract);
      set("model_repair", c.prompts.model_repair);
      set("clarify", c.prompts.clarify);
    }
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) {
        ModelEntry e;
        e.name = m.at("name").get<std::string>();
        e.backend = m.value("backend", e.backend);
        e.endpoint = m.value("endpoint", c.model_endpoint);
        e.model_name = m.value("model_name", e.name);
        if (m.contains("mock_script")) e.mock_script = resolve(base, m.at("mock_script").get<std::string>());
        if (e.backend != "http" && e.backend != "mock") throw ConfigError("unknown backend " + e.backend);
        if (e.backend == "mock" && e.mock_script.empty()) throw ConfigError("mock model " + e.name + " needs mock_script");
        c.models.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

SystemConfig SystemConfig::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  auto c = from_json(j, std::filesystem::absolute(path).parent_path());
  c.apply_env();
  c.validate();
  return c;
}

}  // namespace dairy
