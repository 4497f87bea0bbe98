#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/eval/eval.hpp"
#include "vtsql/llm/llm.hpp"
#include "vtsql/pipeline/pipeline.hpp"
#include "vtsql/service/service.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/trafficgen/trafficgen.hpp"
#include "vtsql/util/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vtsql;

namespace {

struct Common {
  std::string root = service::default_data_dir();
  std::string tables;    // directory of <table>.csv; empty generates the scenario
  std::string scenario;  // defaults to <root>/default_scenario.json
  std::string script;
  std::string backend;
};

void add_common(CLI::App* cmd, Common& c, bool with_backend) {
  cmd->add_option("--root", c.root, "Directory with corpus/, rules.json and type_lexicon.tsv");
  cmd->add_option("--data", c.tables, "Directory of table CSVs written by `gen`");
  cmd->add_option("--scenario", c.scenario, "Scenario spec generated in memory when --data is not given");
  if (with_backend) {
    cmd->add_option("--script", c.script, "Scripted backend file")->check(CLI::ExistingFile);
    cmd->add_option("--backend", c.backend, "Backend descriptor JSON")->check(CLI::ExistingFile);
  }
}

std::unique_ptr<service::Workspace> open_workspace(const Common& c) {
  auto paths = service::WorkspacePaths::bundled(c.root);
  paths.tables_dir = c.tables;
  auto ws = service::Workspace::open(paths);
  if (c.tables.empty()) {
    const std::string spec_path = c.scenario.empty() ? (fs::path(c.root) / "default_scenario.json").string() : c.scenario;
    const auto spec = trafficgen::load_scenario(spec_path);
    auto rules = spec.rules_file.empty() ? ws->rules() : knowledge::load_rules(spec.rules_file);
    const auto scenario = trafficgen::generate(spec, rules);
    scenario.load_into(ws->store());
    ws->set_rules(std::move(rules));
  }
  return ws;
}

std::unique_ptr<llm::LlmBackend> open_backend(const Common& c) {
  if (!c.backend.empty()) {
    const json d = json::parse(read_file(c.backend));
    return llm::make_backend(d, fs::path(c.backend).parent_path().string());
  }
  const std::string script = c.script.empty() ? (fs::path(c.root) / "scripts" / "fixture.json").string() : c.script;
  return std::make_unique<llm::ScriptedBackend>(llm::ScriptedBackend::load(script));
}

std::vector<llm::Representation> parse_reprs(const std::string& text) {
  if (iequals(text, "all")) return llm::all_representations();
  std::vector<llm::Representation> out;
  for (const auto& part : split(text, ',')) out.push_back(llm::parse_representation(trim(part)));
  return out;
}

void print_rows(const ResultSet& rs) {
  std::cout << join(rs.columns(), "\t") << "\n";
  for (const auto& row : rs.rows()) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(display_value(v));
    std::cout << join(cells, "\t") << "\n";
  }
  std::cout << "(" << rs.size() << " rows)\n";
}

service::Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vessel traffic text-to-SQL agent"};
  app.require_subcommand(1);

  // gen
  std::string gen_spec, gen_out;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic traffic scenario");
  gen->add_option("--spec", gen_spec, "Scenario spec JSON")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Override the spec seed");

  // load
  std::string load_dir;
  auto* load = app.add_subcommand("load", "Load and validate table CSVs");
  load->add_option("--dir", load_dir, "Directory of <table>.csv files")->required()->check(CLI::ExistingDirectory);

  // ask
  Common ask_c;
  std::string question, ask_repr = "BASIC";
  bool no_ner = false, no_sair = false, no_rethink = false, ask_trace = false;
  auto* ask = app.add_subcommand("ask", "Answer one question");
  ask->add_option("question", question, "Operator question")->required();
  ask->add_flag("--no-ner", no_ner, "Disable entity recognition");
  ask->add_flag("--no-sair", no_sair, "Treat the model reply as SQL");
  ask->add_flag("--no-rethink", no_rethink, "Disable validation feedback loops");
  ask->add_option("--repr", ask_repr, "Prompt representation");
  ask->add_flag("--trace", ask_trace, "Print the full episode trace as JSON");
  add_common(ask, ask_c, true);

  // bench
  Common bench_c;
  std::string testset, bench_repr = "BASIC", bench_style, bench_out;
  bool b_no_ner = false, b_no_sair = false, b_no_rethink = false;
  std::size_t threads = 1;
  auto* bench = app.add_subcommand("bench", "Score a test set");
  bench->add_option("--testset", testset, "JSON Lines test set")->required()->check(CLI::ExistingFile);
  bench->add_option("--repr", bench_repr, "Representation list or 'all'");
  bench->add_option("--style", bench_style, "OPERATIONAL, COMMAND or FORMAL");
  bench->add_option("--out", bench_out, "Directory for report.json and report.txt");
  bench->add_option("--threads", threads, "Concurrent episodes");
  bench->add_flag("--no-ner", b_no_ner);
  bench->add_flag("--no-sair", b_no_sair);
  bench->add_flag("--no-rethink", b_no_rethink);
  add_common(bench, bench_c, true);

  // export-sql
  Common exp_c;
  std::string exp_out;
  auto* exp = app.add_subcommand("export-sql", "Write CREATE TABLE and INSERT statements");
  exp->add_option("--out", exp_out, "Output file")->required();
  add_common(exp, exp_c, false);

  // sql
  Common sql_c;
  std::string sql_text;
  auto* sqlcmd = app.add_subcommand("sql", "Run one SQL statement against the store");
  sqlcmd->add_option("statement", sql_text, "SELECT statement")->required();
  add_common(sqlcmd, sql_c, false);

  // schema
  std::string schema_repr = "BASIC";
  auto* schema = app.add_subcommand("schema", "Print the prompt schema block");
  schema->add_option("--repr", schema_repr, "Prompt representation");

  // serve
  Common serve_c;
  std::string config_path;
  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--config", config_path, "Service config JSON")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listen port");
  add_common(serve, serve_c, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const std::string spec_path =
          gen_spec.empty() ? (fs::path(service::default_data_dir()) / "default_scenario.json").string() : gen_spec;
      auto spec = trafficgen::load_scenario(spec_path);
      if (gen_seed) spec.seed = *gen_seed;
      const auto rules = spec.rules_file.empty() ? std::vector<knowledge::RuleRecord>{}
                                                 : knowledge::load_rules(spec.rules_file);
      const auto scenario = trafficgen::generate(spec, rules);
      sql::TableStore store;
      scenario.load_into(store);
      fs::create_directories(gen_out);
      const auto snap = store.snapshot();
      for (const auto& t : store.schema().tables()) {
        const std::string csv = sql::export_csv(*snap, t.name);
        write_file((fs::path(gen_out) / (t.name + ".csv")).string(), csv);
        std::cout << t.name << ".csv " << hex64(fnv1a64(csv)) << " " << snap->table(t.name).rows.size()
                  << " rows\n";
      }
      write_file((fs::path(gen_out) / "labels.json").string(), scenario.truth.to_json().dump(2) + "\n");
      json rules_json = json::array();
      for (const auto& r : scenario.rules) rules_json.push_back(knowledge::to_json(r));
      write_file((fs::path(gen_out) / "rules.json").string(), json{{"rules", rules_json}}.dump(2) + "\n");
      return 0;
    }
    if (*load) {
      sql::TableStore store;
      for (const auto& [table, n] : store.load_dir(load_dir)) std::cout << table << ": " << n << " rows\n";
      return 0;
    }
    if (*schema) {
      std::cout << llm::render_schema(SchemaRegistry::vessel_traffic(), llm::parse_representation(schema_repr));
      return 0;
    }
    if (*sqlcmd) {
      auto ws = open_workspace(sql_c);
      const auto snap = ws->store().snapshot();
      print_rows(sql::execute_sql(sql_text, *snap, {pipeline::snapshot_now(*snap), std::nullopt}));
      return 0;
    }
    if (*exp) {
      auto ws = open_workspace(exp_c);
      write_file(exp_out, sql::export_sql(*ws->store().snapshot(), ws->store().schema()));
      return 0;
    }
    if (*ask) {
      auto ws = open_workspace(ask_c);
      auto backend = open_backend(ask_c);
      pipeline::PipelineConfig cfg;
      cfg.enable_ner = !no_ner;
      cfg.enable_sair = !no_sair;
      cfg.enable_rethink = !no_rethink;
      cfg.representation = llm::parse_representation(ask_repr);
      const auto trace = pipeline::run_episode(question, cfg, ws->resources(backend.get()));
      if (ask_trace) {
        std::cout << trace.to_json(true).dump(2) << "\n";
      } else {
        for (const auto& a : trace.annotations) {
          std::cout << "entity  " << a.surface << " -> " << a.tag_path
                    << (a.canonical.empty() ? "" : " (" + a.canonical + ")") << "\n";
        }
        for (const auto& d : trace.retrieved) std::cout << "doc     " << d.doc_id << "\n";
        for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
          const auto& v = trace.iterations[i].verdict;
          std::cout << "iter " << i + 1 << "  " << verdict_class_name(v.cls)
                    << (v.message.empty() ? "" : "  " + v.message) << "\n";
        }
        if (!trace.ir.empty()) std::cout << "SAIR    " << trace.ir << "\n";
        if (!trace.sql.empty()) std::cout << "SQL     " << trace.sql << "\n";
      }
      if (trace.result) {
        if (!ask_trace) print_rows(*trace.result);
        return 0;
      }
      std::cerr << "FAILED: " << trace.failure << "\n";
      return 1;
    }
    if (*bench) {
      auto ws = open_workspace(bench_c);
      auto backend = open_backend(bench_c);
      eval::BenchmarkOptions opt;
      opt.representations = parse_reprs(bench_repr);
      if (!bench_style.empty()) opt.style = eval::parse_style(bench_style);
      opt.config.enable_ner = !b_no_ner;
      opt.config.enable_sair = !b_no_sair;
      opt.config.enable_rethink = !b_no_rethink;
      opt.label = backend->describe();
      opt.threads = threads;
      const auto report = eval::run_benchmark(eval::load_testset(testset), opt, ws->resources(backend.get()));
      std::cout << report.to_table();
      if (!bench_out.empty()) {
        fs::create_directories(bench_out);
        write_file((fs::path(bench_out) / "report.json").string(), report.to_json(true).dump(2) + "\n");
        write_file((fs::path(bench_out) / "report.txt").string(), report.to_table());
      }
      return 0;
    }
    if (*serve) {
      service::ServiceConfig cfg;
      std::string base = ".";
      if (!config_path.empty()) {
        cfg = service::ServiceConfig::from_json(json::parse(read_file(config_path)));
        base = fs::path(config_path).parent_path().string();
      }
      if (port) cfg.port = *port;
      auto ws = open_workspace(serve_c);
      std::unique_ptr<llm::LlmBackend> backend;
      if (!serve_c.script.empty() || !serve_c.backend.empty()) {
        backend = open_backend(serve_c);
      } else if (!config_path.empty()) {
        backend = llm::make_backend(cfg.backend, base);
      } else {
        backend = open_backend(serve_c);
      }
      service::Service svc(cfg, *ws, *backend);
      const int bound = svc.bind();
      if (bound < 0) {
        std::cerr << "cannot bind " << cfg.host << ":" << cfg.port << "\n";
        return 1;
      }
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << cfg.host << ":" << bound << std::endl;
      svc.serve();
      g_service = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
