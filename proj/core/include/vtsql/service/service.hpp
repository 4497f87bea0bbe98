#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtsql/knowledge/corpus.hpp"
#include "vtsql/knowledge/rules.hpp"
#include "vtsql/llm/llm.hpp"
#include "vtsql/ner/ner.hpp"
#include "vtsql/pipeline/pipeline.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::service {

// Directory holding the bundled scenario, rules, corpus and lexicon.
std::string default_data_dir();

struct WorkspacePaths {
  std::string tables_dir;  // <table>.csv files; empty leaves the store empty
  std::string corpus_dir;
  std::string rules_file;
  std::string lexicon_file;

  // Bundled knowledge files under `root`, no tables.
  static WorkspacePaths bundled(const std::string& root = default_data_dir());
};

// Store, knowledge corpus, rules and lexicon loaded together; the
// knowledge side is immutable once open.
class Workspace {
 public:
  static std::unique_ptr<Workspace> open(const WorkspacePaths& paths);

  sql::TableStore& store() { return store_; }
  const knowledge::Corpus& corpus() const { return *corpus_; }
  const knowledge::Bm25Index& index() const { return *index_; }
  const std::vector<knowledge::RuleRecord>& rules() const { return rules_; }
  void set_rules(std::vector<knowledge::RuleRecord> rules) { rules_ = std::move(rules); }

  // Pins the current snapshot and its gazetteer.
  pipeline::Resources resources(llm::LlmBackend* backend);

 private:
  Workspace() = default;
  sql::TableStore store_;
  std::unique_ptr<knowledge::Corpus> corpus_;
  std::unique_ptr<knowledge::Bm25Index> index_;
  std::vector<knowledge::RuleRecord> rules_;
  std::unique_ptr<ner::GazetteerCache> gazetteers_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  nlohmann::json backend = {{"kind", "scripted"}, {"script", "scripts/fixture.json"}};
  pipeline::PipelineConfig pipeline;
  std::string cors_origin;  // empty disables CORS headers
  std::string api_key;      // empty disables the X-API-Key check
  std::chrono::seconds session_idle{1800};
  std::size_t max_inflight = 4;

  static ServiceConfig from_json(const nlohmann::json& j);
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Request handlers, usable without a socket. No handler mutates the store.
class Service {
 public:
  Service(ServiceConfig config, Workspace& workspace, llm::LlmBackend& backend);
  ~Service();

  // {session_id?, text, style?, representation?}
  Response query(const nlohmann::json& request);
  Response vessels();
  Response zones();

  // Binds config host/port (0 picks a free port) and returns the port,
  // or -1 on failure. serve() then blocks until stop().
  int bind();
  bool serve();
  void stop();

  pipeline::SessionCache& sessions() { return sessions_; }

 private:
  struct Http;
  bool loaded() const;

  ServiceConfig config_;
  Workspace& workspace_;
  llm::LlmBackend& backend_;
  pipeline::SessionCache sessions_;
  std::unique_ptr<Http> http_;
};

}  // namespace vtsql::service
