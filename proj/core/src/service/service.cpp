#include "vtsql/service/service.hpp"

#include <filesystem>
#include <semaphore>
#include <set>

#include <httplib.h>

#include "vtsql/error.hpp"
#include "vtsql/eval/eval.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::service {
namespace {

using nlohmann::json;

Response error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

}  // namespace

std::string default_data_dir() {
#ifdef VTSQL_DEFAULT_DATA_DIR
  if (const char* env = std::getenv("VTSQL_DATA_DIR"); env && *env) return env;
  return VTSQL_DEFAULT_DATA_DIR;
#else
  const char* env = std::getenv("VTSQL_DATA_DIR");
  return env ? env : "data";
#endif
}

WorkspacePaths WorkspacePaths::bundled(const std::string& root) {
  const std::filesystem::path r(root);
  return {"", (r / "corpus").string(), (r / "rules.json").string(), (r / "type_lexicon.tsv").string()};
}

std::unique_ptr<Workspace> Workspace::open(const WorkspacePaths& paths) {
  std::unique_ptr<Workspace> w(new Workspace());
  w->corpus_ = std::make_unique<knowledge::Corpus>(
      paths.corpus_dir.empty() ? knowledge::Corpus() : knowledge::Corpus::load_dir(paths.corpus_dir));
  w->index_ = std::make_unique<knowledge::Bm25Index>(*w->corpus_);
  if (!paths.rules_file.empty()) w->rules_ = knowledge::load_rules(paths.rules_file);
  w->gazetteers_ = std::make_unique<ner::GazetteerCache>(
      paths.lexicon_file.empty() ? std::vector<ner::LexiconEntry>{} : ner::load_lexicon(paths.lexicon_file));
  if (!paths.tables_dir.empty()) w->store_.load_dir(paths.tables_dir);
  return w;
}

pipeline::Resources Workspace::resources(llm::LlmBackend* backend) {
  pipeline::Resources r;
  r.snapshot = store_.snapshot();
  r.gazetteer = gazetteers_->get(*r.snapshot);
  r.retriever = corpus_->empty() ? nullptr : index_.get();
  r.rules = &rules_;
  r.backend = backend;
  return r;
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  if (j.contains("backend")) c.backend = j["backend"];
  if (j.contains("pipeline")) c.pipeline = pipeline::PipelineConfig::from_json(j["pipeline"]);
  c.cors_origin = j.value("cors_origin", c.cors_origin);
  c.api_key = j.value("api_key", c.api_key);
  c.session_idle = std::chrono::seconds(j.value("session_idle_s", c.session_idle.count()));
  c.max_inflight = j.value("max_inflight", c.max_inflight);
  if (c.max_inflight == 0) throw Error(Errc::Config, "max_inflight must be >= 1");
  if (c.port < 0 || c.port > 65535) throw Error(Errc::Config, "port out of range");
  return c;
}

struct Service::Http {
  explicit Http(std::size_t inflight) : slots(static_cast<std::ptrdiff_t>(inflight)) {}
  httplib::Server server;
  std::counting_semaphore<> slots;
};

Service::Service(ServiceConfig config, Workspace& workspace, llm::LlmBackend& backend)
    : config_(std::move(config)),
      workspace_(workspace),
      backend_(backend),
      sessions_(config_.session_idle),
      http_(std::make_unique<Http>(config_.max_inflight)) {
  config_.pipeline.validate();
  auto& srv = http_->server;
  auto send = [this](httplib::Response& res, const Response& r) {
    res.status = r.status;
    if (!config_.cors_origin.empty()) res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
    res.set_content(r.body.dump(), "application/json");
  };
  auto authorized = [this, send](const httplib::Request& req, httplib::Response& res) {
    if (config_.api_key.empty() || req.get_header_value("X-API-Key") == config_.api_key) return true;
    send(res, error_response(401, "UNAUTHORIZED", "missing or wrong X-API-Key"));
    return false;
  };
  srv.Post("/api/query", [this, send, authorized](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req, res)) return;
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      send(res, error_response(400, "BAD_REQUEST", "body must be a JSON object"));
      return;
    }
    http_->slots.acquire();
    Response r;
    try {
      r = query(body);
    } catch (...) {
      http_->slots.release();
      throw;
    }
    http_->slots.release();
    send(res, r);
  });
  srv.Get("/api/vessels", [this, send, authorized](const httplib::Request& req, httplib::Response& res) {
    if (authorized(req, res)) send(res, vessels());
  });
  srv.Get("/api/zones", [this, send, authorized](const httplib::Request& req, httplib::Response& res) {
    if (authorized(req, res)) send(res, zones());
  });
  srv.Options(R"(/api/.*)", [this](const httplib::Request&, httplib::Response& res) {
    if (!config_.cors_origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-API-Key");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    }
    res.status = 204;
  });
  srv.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_response(500, "INTERNAL", what));
  });
}

Service::~Service() { stop(); }

bool Service::loaded() const { return workspace_.store().snapshot()->total_rows() > 0; }

Response Service::query(const json& req) {
  const std::string text = trim(req.value("text", ""));
  if (text.empty()) return error_response(422, "EMPTY_TEXT", "text must not be empty");
  if (!loaded()) return error_response(503, "NOT_LOADED", "no store snapshot loaded");

  pipeline::PipelineConfig cfg = config_.pipeline;
  std::string style;
  try {
    if (req.contains("representation")) {
      cfg.representation = llm::parse_representation(req["representation"].get<std::string>());
    }
    if (req.contains("style")) style = eval::style_name(eval::parse_style(req["style"].get<std::string>()));
  } catch (const Error& e) {
    return error_response(400, "BAD_REQUEST", e.what());
  } catch (const json::exception& e) {
    return error_response(400, "BAD_REQUEST", e.what());
  }

  std::string session = req.value("session_id", "");
  if (session.empty()) {
    session = sessions_.create();
  } else if (!sessions_.touch(session)) {
    return error_response(404, "UNKNOWN_SESSION", "unknown or expired session " + session);
  }

  const pipeline::Resources resources = workspace_.resources(&backend_);
  auto trace = std::make_shared<pipeline::EpisodeTrace>(pipeline::run_episode(text, cfg, resources, style));
  sessions_.put(session, trace);

  json out{{"session_id", session}, {"sql", trace->sql}, {"terminal", trace->terminal == pipeline::Terminal::Result ? "RESULT" : "FAILED"}};
  if (cfg.enable_sair) out["ir"] = trace->ir;
  json columns = json::array();
  json rows = json::array();
  json highlights = json::array();
  json zones = json::array();
  if (trace->result) {
    const json rs = trace->result->to_json();
    columns = rs["columns"];
    rows = rs["rows"];
    std::set<std::int64_t> mmsis;
    for (const char* col : {"mmsi", "mmsi_a", "mmsi_b"}) {
      const auto idx = trace->result->column_index(col);
      if (!idx) continue;
      for (const auto& row : trace->result->rows()) {
        if (const auto* v = std::get_if<std::int64_t>(&row[*idx])) mmsis.insert(*v);
      }
    }
    for (const auto& v : resources.snapshot->vessels()) {
      if (mmsis.contains(v.mmsi)) highlights.push_back({{"mmsi", v.mmsi}, {"lat", v.lat}, {"lon", v.lon}});
    }
  }
  if (!trace->sql.empty()) {
    try {
      for (const auto& name : sql::referenced_shapes(sql::parse_sql(trace->sql))) {
        if (const auto* s = resources.snapshot->find_shape(name)) zones.push_back(to_json(*s));
      }
    } catch (const Error&) {
    }
  }
  out["columns"] = columns;
  out["rows"] = rows;
  out["highlights"] = highlights;
  out["zones"] = zones;
  if (!trace->failure.empty()) out["failure"] = trace->failure;
  out["trace"] = trace->to_json(true);
  return {200, out};
}

Response Service::vessels() {
  if (!loaded()) return error_response(503, "NOT_LOADED", "no store snapshot loaded");
  json list = json::array();
  for (const auto& v : workspace_.store().snapshot()->vessels()) list.push_back(to_json(v));
  return {200, {{"vessels", list}}};
}

Response Service::zones() {
  if (!loaded()) return error_response(503, "NOT_LOADED", "no store snapshot loaded");
  json list = json::array();
  for (const auto& s : workspace_.store().snapshot()->shapes()) list.push_back(to_json(s));
  return {200, {{"zones", list}}};
}

int Service::bind() {
  auto& srv = http_->server;
  if (config_.port == 0) return srv.bind_to_any_port(config_.host);
  return srv.bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

bool Service::serve() { return http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_ && http_->server.is_running()) http_->server.stop();
}

}  // namespace vtsql::service
