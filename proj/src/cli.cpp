#include "dairy/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "dairy/engine.hpp"
#include "dairy/eval.hpp"
#include "dairy/service.hpp"

namespace dairy {

namespace {

std::atomic<Service*> g_service{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_service.load()) s->stop();
}

SystemConfig load_config(const std::string& flag) {
  std::string path = flag;
  if (path.empty()) {
    if (const char* env = std::getenv("DAIRY_CONFIG"); env && *env) path = env;
  }
  if (path.empty() && std::filesystem::exists("config/dairy.json")) path = "config/dairy.json";
  SystemConfig c = path.empty() ? SystemConfig::defaults(std::filesystem::current_path()) : SystemConfig::load(path);
  c.validate();
  return c;
}

void require_file(const std::string& p) {
  if (!std::filesystem::is_regular_file(p)) throw IngestionError("ingest", "no such file: " + p);
}

void print_answer(std::ostream& out, const TurnResult& r) {
  const auto& a = *r.turn.answer;
  out << "[" << to_string(r.turn.route) << "] " << a.body << "\n";
  if (a.error) out << "\nfailed stage: " << a.error->stage << "\n";
  out << "\nturn " << r.turn.turn_id << ", " << r.turn.spans.size() << " spans, " << r.total_seconds << " s\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"On-farm dairy decision-support engine"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Config file (JSON)");

  auto* ingest = app.add_subcommand("ingest", "Load the farm data stores and the abstract corpus");
  std::string sql_csv, nosql_json, corpus_jsonl;
  ingest->add_option("--sql", sql_csv, "Test-day CSV for the relational store");
  ingest->add_option("--nosql", nosql_json, "Herd documents (JSON array or JSON lines)");
  ingest->add_option("--corpus", corpus_jsonl, "Abstract corpus (JSON lines)");

  auto* ask = app.add_subcommand("ask", "Answer one question");
  std::string question, route, model, session = "cli", out_dir = ".";
  bool as_json = false;
  ask->add_option("question", question, "Question text")->required();
  ask->add_option("--route", route, "Send straight to a subagent (text, sql, nosql, model, clarify)");
  ask->add_option("--model", model, "Registry model name");
  ask->add_option("--session", session, "Session id");
  ask->add_option("--out-dir", out_dir, "Where plot SVGs are written");
  ask->add_flag("--json", as_json, "Print the full TurnResult JSON");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host;
  int port = -1;
  std::string serve_model;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--model", serve_model, "Registry model name");

  auto* ev = app.add_subcommand("eval", "Run an evaluation phase");
  int phase = 2;
  std::vector<std::string> models;
  std::string format = "table-text", items_path, output_path;
  ev->add_option("--phase", phase, "1 (screening) or 2 (benchmark)")->check(CLI::IsMember({1, 2}));
  ev->add_option("--model", models, "Registry model name (repeatable)");
  ev->add_option("--format", format, "table-text, json or csv");
  ev->add_option("--items", items_path, "Item file (default: <eval_dir>/phase<N>.json)");
  ev->add_option("--output", output_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    auto config = load_config(config_path);

    if (*ingest) {
      if (sql_csv.empty() && nosql_json.empty() && corpus_jsonl.empty()) {
        err << "error: ingest needs at least one of --sql, --nosql, --corpus\n\n" << ingest->help();
        return 2;
      }
      for (const auto& p : {sql_csv, nosql_json, corpus_jsonl}) {
        if (!p.empty()) require_file(p);
      }
      if (!sql_csv.empty()) {
        const auto r = ingest_csv(sql_csv, config.sql_store);
        out << "sql: " << r.loaded << " rows loaded, " << r.rejected << " rejected -> " << config.sql_store.string()
            << "\n";
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
      }
      if (!nosql_json.empty()) {
        const auto store = DocumentStore::load(nosql_json);
        const auto& r = store.report();
        out << "nosql: " << r.documents << " documents, " << r.rows << " event rows, " << r.skipped << " skipped\n";
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
      }
      if (!corpus_jsonl.empty()) {
        LiteratureIndex idx(std::make_shared<HashingEmbedder>());
        const auto r = idx.ingest(corpus_jsonl);
        out << "corpus: " << r.count << " abstracts, " << r.rejected << " rejected, dim " << r.dim << "\n";
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
      }
      return 0;
    }

    if (*ask) {
      std::optional<RouteLabel> direct;
      if (!route.empty()) {
        const auto r = parse_route(route);
        if (!r || *r == RouteLabel::Unknown) {
          err << "error: unknown route " << route << "\n";
          return 2;
        }
        direct = *r;
      }
      const auto cfg = config_for_model(config, model);
      Engine engine(cfg, make_backend(config, model));
      const auto r = engine.handle_turn(UserQuery::make(question, session), direct);
      if (as_json) {
        out << dump_json(r.to_json(), 2) << "\n";
      } else {
        print_answer(out, r);
      }
      for (const auto& a : r.turn.answer->attachments) {
        if (a.kind != Attachment::Kind::Svg || !a.payload.is_string()) continue;
        std::filesystem::create_directories(out_dir);
        const auto path = std::filesystem::path(out_dir) / (r.turn.turn_id + "-" + a.id + ".svg");
        std::ofstream f(path, std::ios::binary);
        f << a.payload.get<std::string>();
        if (!f) throw Error("ask", "cannot write " + path.string());
        if (!as_json) out << "plot written to " << path.string() << "\n";
      }
      return r.turn.answer->error ? 1 : 0;
    }

    if (*serve) {
      if (!host.empty()) config.host = host;
      if (port >= 0) config.port = port;
      const auto cfg = config_for_model(config, serve_model);
      Engine engine(cfg, make_backend(config, serve_model));
      Service service(engine);
      const int bound = service.bind(cfg.host, cfg.port);
      out << "serving on http://" << cfg.host << ":" << bound << " (model " << engine.model_description() << ")"
          << std::endl;
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
      return 0;
    }

    if (*ev) {
      const auto fmt = eval::parse_format(format);
      const auto path = items_path.empty() ? config.eval_dir / ("phase" + std::to_string(phase) + ".json")
                                           : std::filesystem::path(items_path);
      const auto items = eval::load_items(path);
      if (models.empty()) models.push_back(config.default_model.empty() ? config.model_name : config.default_model);
      std::vector<eval::PhaseReport> reports;
      for (const auto& m : models) {
        const bool registered = config.find_model(m) != nullptr;
        const auto cfg = registered ? config_for_model(config, m) : config;
        Engine engine(cfg, registered ? make_backend(config, m) : make_backend(config, ""));
        reports.push_back(eval::run_phase(engine, items, phase, m));
      }
      const auto text = eval::render_reports(reports, fmt);
      if (output_path.empty()) {
        out << text;
      } else {
        std::ofstream f(output_path, std::ios::binary);
        f << text;
        if (!f) throw Error("eval", "cannot write " + output_path);
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace dairy
