#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtsql/knowledge/corpus.hpp"
#include "vtsql/knowledge/rules.hpp"
#include "vtsql/knowledge/tools.hpp"
#include "vtsql/llm/llm.hpp"
#include "vtsql/model/result_set.hpp"
#include "vtsql/ner/ner.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::pipeline {

struct PipelineConfig {
  bool enable_ner = true;
  bool enable_sair = true;
  bool enable_rethink = true;
  bool enable_tools = true;
  llm::Representation representation = llm::Representation::Basic;
  int max_rethink_iterations = 3;
  int max_tool_calls = 3;  // per iteration
  std::size_t retrieval_k = 4;
  std::optional<Timestamp> now;  // defaults to the latest ship_ais ts

  void validate() const;  // CONFIG
  nlohmann::json to_json() const;
  // Missing keys keep their defaults.
  static PipelineConfig from_json(const nlohmann::json& j);
};

// Latest ts in ship_ais, or the epoch for an empty snapshot.
Timestamp snapshot_now(const sql::Snapshot& snapshot);

enum class VerdictClass { Pass, Syntax, Schema, Runtime, EmptySuspect };
std::string_view verdict_class_name(VerdictClass c);

struct Verdict {
  VerdictClass cls = VerdictClass::Pass;
  std::string message;
  std::string token;
  std::string suggestion;
  std::optional<std::size_t> position;
  std::string ir;   // canonical SAIR text when the draft was SAIR
  std::string sql;  // canonical SQL once the draft compiled or parsed

  // EMPTY_SUSPECT is advisory and counts as accepted.
  bool ok() const { return cls == VerdictClass::Pass || cls == VerdictClass::EmptySuspect; }
  nlohmann::json to_json() const;
};

// Model reply with code fences and surrounding whitespace removed.
std::string extract_draft(std::string_view reply);

// Parse (SAIR or SQL per config), resolve, then dry-run with LIMIT 5.
// Zero dry-run rows for a query that names a zone or a resolved entity
// yields EMPTY_SUSPECT.
Verdict validate_draft(std::string_view draft, const PipelineConfig& config, const sql::Snapshot& snapshot,
                       Timestamp now, const std::vector<ner::EntityAnnotation>& annotations = {});

std::string rethink_feedback(const Verdict& verdict, std::string_view previous_draft);

struct ToolUse {
  knowledge::ToolCall call;
  nlohmann::json result;
  std::string error;
};

struct Iteration {
  std::vector<std::string> replies;  // every reply, tool calls included
  std::vector<ToolUse> tools;
  std::string draft;
  Verdict verdict;
  std::string feedback;  // empty when no retry followed
};

enum class Terminal { Result, Failed };

struct RetrievedDoc {
  std::string doc_id;
  std::string title;
  double score = 0;
};

struct EpisodeTrace {
  std::string query;
  std::string style;
  PipelineConfig config;
  Timestamp now{};
  std::vector<ner::EntityAnnotation> annotations;
  std::vector<ner::ProbeOutcome> probes;
  std::vector<RetrievedDoc> retrieved;
  std::vector<std::string> rule_fragments;
  llm::PromptBundle bundle;
  std::vector<Iteration> iterations;
  std::size_t llm_calls = 0;
  Terminal terminal = Terminal::Failed;
  std::string ir;
  std::string sql;
  std::optional<ResultSet> result;
  std::string failure;  // error class and message when FAILED
  std::map<std::string, double> timings_ms;

  // Timings live in their own "timings" key, omitted when not wanted.
  nlohmann::json to_json(bool include_timings = true) const;
};

struct Resources {
  sql::SnapshotPtr snapshot;
  std::shared_ptr<const ner::Gazetteer> gazetteer;  // required when NER is on
  const knowledge::Retriever* retriever = nullptr;
  const std::vector<knowledge::RuleRecord>* rules = nullptr;
  llm::LlmBackend* backend = nullptr;
};

// Never throws for model or data problems; these end in a FAILED trace.
EpisodeTrace run_episode(std::string_view query, const PipelineConfig& config, const Resources& resources,
                         std::string_view style = "");

// Last trace per session with idle expiry. Ids are 128 random bits in hex.
class SessionCache {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionCache(std::chrono::seconds idle_timeout = std::chrono::minutes(30))
      : idle_timeout_(idle_timeout) {}

  std::string create();
  // Unknown or expired ids yield false; a valid id is touched.
  bool touch(const std::string& id);
  void put(const std::string& id, std::shared_ptr<const EpisodeTrace> trace);
  std::shared_ptr<const EpisodeTrace> last(const std::string& id);
  std::size_t size();
  void expire();

 private:
  struct Entry {
    Clock::time_point created;
    Clock::time_point last_active;
    std::shared_ptr<const EpisodeTrace> trace;
  };
  std::chrono::seconds idle_timeout_;
  std::mutex mu_;
  std::map<std::string, Entry> sessions_;
};

}  // namespace vtsql::pipeline
