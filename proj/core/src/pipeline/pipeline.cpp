#include "vtsql/pipeline/pipeline.hpp"

#include <random>

#include "vtsql/error.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::pipeline {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(std::map<std::string, double>& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(Clock::now()) {}
  ~StageTimer() {
    sink_[name_] += std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  std::map<std::string, double>& sink_;
  std::string name_;
  Clock::time_point start_;
};

VerdictClass classify(Errc code) {
  switch (code) {
    case Errc::SyntaxError:
    case Errc::SairSyntaxError: return VerdictClass::Syntax;
    case Errc::SchemaError:
    case Errc::SairSchemaError:
    case Errc::UnknownZone: return VerdictClass::Schema;
    default: return VerdictClass::Runtime;
  }
}

Verdict failed(const Error& e, Verdict v) {
  v.cls = classify(e.code());
  v.message = std::string(errc_name(e.code())) + ": " + e.what();
  v.token = e.token();
  v.suggestion = e.suggestion();
  if (e.position() != Error::npos) v.position = e.position();
  return v;
}

bool names_entity(const std::vector<ner::EntityAnnotation>& annotations) {
  for (const auto& a : annotations) {
    if (a.resolution && !a.tag_path.starts_with("VESSEL_TYPE") && !a.tag_path.starts_with("TEMPORAL")) {
      return true;
    }
  }
  return false;
}

json probe_json(const ner::ProbeOutcome& p) {
  json j{{"annotation", p.probe.annotation}, {"table", p.probe.table}, {"sql", p.probe.sql}};
  if (p.rows) j["rows"] = p.rows->to_json();
  else j["error"] = p.error;
  return j;
}

std::string one_line(std::string_view text) {
  std::string out;
  for (const auto& l : split(text, '\n')) {
    const std::string t = trim(l);
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void fail(EpisodeTrace& t, std::string msg) {
  t.terminal = Terminal::Failed;
  t.failure = std::move(msg);
  t.result.reset();
}

}  // namespace

void PipelineConfig::validate() const {
  if (enable_rethink && max_rethink_iterations < 1) {
    throw Error(Errc::Config, "max_rethink_iterations must be >= 1 when rethink is enabled");
  }
  if (max_tool_calls < 0) throw Error(Errc::Config, "max_tool_calls must be >= 0");
  if (retrieval_k < 1) throw Error(Errc::Config, "retrieval_k must be >= 1");
}

json PipelineConfig::to_json() const {
  json j{{"enable_ner", enable_ner},
         {"enable_sair", enable_sair},
         {"enable_rethink", enable_rethink},
         {"enable_tools", enable_tools},
         {"representation", std::string(llm::representation_name(representation))},
         {"max_rethink_iterations", max_rethink_iterations},
         {"max_tool_calls", max_tool_calls},
         {"retrieval_k", retrieval_k}};
  j["now"] = now ? json(format_timestamp_sql(*now)) : json(nullptr);
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  c.enable_ner = j.value("enable_ner", c.enable_ner);
  c.enable_sair = j.value("enable_sair", c.enable_sair);
  c.enable_rethink = j.value("enable_rethink", c.enable_rethink);
  c.enable_tools = j.value("enable_tools", c.enable_tools);
  if (j.contains("representation")) c.representation = llm::parse_representation(j["representation"].get<std::string>());
  c.max_rethink_iterations = j.value("max_rethink_iterations", c.max_rethink_iterations);
  c.max_tool_calls = j.value("max_tool_calls", c.max_tool_calls);
  c.retrieval_k = j.value("retrieval_k", c.retrieval_k);
  if (j.contains("now") && j["now"].is_string()) {
    c.now = parse_timestamp(j["now"].get<std::string>());
    if (!c.now) throw Error(Errc::Config, "malformed pipeline 'now'");
  }
  c.validate();
  return c;
}

Timestamp snapshot_now(const sql::Snapshot& snapshot) {
  Timestamp latest{};
  bool any = false;
  for (const auto& v : snapshot.vessels()) {
    if (!any || latest < v.ts) latest = v.ts;
    any = true;
  }
  return latest;
}

std::string_view verdict_class_name(VerdictClass c) {
  switch (c) {
    case VerdictClass::Pass: return "PASS";
    case VerdictClass::Syntax: return "SYNTAX";
    case VerdictClass::Schema: return "SCHEMA";
    case VerdictClass::Runtime: return "RUNTIME";
    case VerdictClass::EmptySuspect: return "EMPTY_SUSPECT";
  }
  return "?";
}

json Verdict::to_json() const {
  json j{{"class", std::string(verdict_class_name(cls))}, {"ok", ok()}};
  if (!message.empty()) j["message"] = message;
  if (!token.empty()) j["token"] = token;
  if (!suggestion.empty()) j["suggestion"] = suggestion;
  if (position) j["position"] = *position;
  if (!ir.empty()) j["ir"] = ir;
  if (!sql.empty()) j["sql"] = sql;
  return j;
}

std::string extract_draft(std::string_view reply) {
  std::string text = trim(reply);
  // first fenced block wins; prose around it is dropped
  const auto open = text.find("```");
  if (open == std::string::npos) return text;
  const auto nl = text.find('\n', open);
  if (nl == std::string::npos) return text;
  const auto close = text.find("```", nl + 1);
  if (close == std::string::npos) return text;
  return trim(text.substr(nl + 1, close - nl - 1));
}

Verdict validate_draft(std::string_view draft, const PipelineConfig& config, const sql::Snapshot& snapshot,
                       Timestamp now, const std::vector<ner::EntityAnnotation>& annotations) {
  Verdict v;
  std::string sql_text(draft);
  try {
    if (config.enable_sair) {
      const auto ir = sair::parse_sair(draft);
      v.ir = sair::print(ir);
      sql_text = sair::compile(ir);
    }
    sql::SqlAst ast = sql::prepare(sql_text);
    v.sql = sql::to_sql(ast);
    const ResultSet dry = sql::execute(ast, snapshot, {now, 5});
    if (dry.empty() && (!sql::referenced_shapes(ast).empty() || names_entity(annotations))) {
      v.cls = VerdictClass::EmptySuspect;
      v.message = "dry run returned no rows for a query naming known entities";
    }
  } catch (const Error& e) {
    return failed(e, std::move(v));
  }
  return v;
}

std::string rethink_feedback(const Verdict& v, std::string_view previous_draft) {
  std::string out;
  switch (v.cls) {
    case VerdictClass::Pass:
      return "";
    case VerdictClass::Syntax:
      out = "Your previous answer has a SYNTAX error";
      if (v.position) out += " at position " + std::to_string(*v.position);
      if (!v.token.empty()) out += " near '" + v.token + "'";
      out += ": " + v.message + "\nCheck parentheses, keywords and quoting.";
      break;
    case VerdictClass::Schema:
      out = "Your previous answer has a SCHEMA error";
      if (!v.token.empty()) out += ": unknown identifier '" + v.token + "'";
      out += ".\n" + v.message;
      if (!v.suggestion.empty()) out += "\nDid you mean '" + v.suggestion + "'?";
      out += "\nUse only the tables and columns listed in the schema.";
      break;
    case VerdictClass::Runtime:
      out = "Your previous answer failed at RUNTIME: " + v.message +
            "\nCheck operand types and that spatial predicates use zone polygons.";
      break;
    case VerdictClass::EmptySuspect:
      out = "Your previous answer ran but returned no rows although the question names known entities."
            "\nRe-check the predicates, literal values and zone names.";
      break;
  }
  out += "\nPrevious answer:\n" + std::string(previous_draft) + "\nReply with the corrected answer only.";
  return out;
}

json EpisodeTrace::to_json(bool include_timings) const {
  json anns = json::array();
  for (const auto& a : annotations) anns.push_back(ner::to_json(a));
  json probes_json = json::array();
  for (const auto& p : probes) probes_json.push_back(probe_json(p));
  json docs = json::array();
  for (const auto& d : retrieved) docs.push_back({{"doc_id", d.doc_id}, {"title", d.title}, {"score", d.score}});
  json iters = json::array();
  for (const auto& it : iterations) {
    json tools = json::array();
    for (const auto& u : it.tools) {
      json tj{{"tool", u.call.tool}, {"args", u.call.args}};
      if (u.error.empty()) tj["result"] = u.result;
      else tj["error"] = u.error;
      tools.push_back(std::move(tj));
    }
    iters.push_back({{"replies", it.replies},
                     {"tools", tools},
                     {"draft", it.draft},
                     {"verdict", it.verdict.to_json()},
                     {"feedback", it.feedback}});
  }
  json j{{"query", query},
         {"style", style},
         {"config", config.to_json()},
         {"now", format_timestamp_sql(now)},
         {"annotations", anns},
         {"probes", probes_json},
         {"retrieved", docs},
         {"rule_fragments", rule_fragments},
         {"prompt", bundle.to_json()},
         {"iterations", iters},
         {"llm_calls", llm_calls},
         {"terminal", terminal == Terminal::Result ? "RESULT" : "FAILED"},
         {"ir", ir},
         {"sql", sql}};
  j["result"] = result ? result->to_json() : json(nullptr);
  if (!failure.empty()) j["failure"] = failure;
  if (include_timings) j["timings"] = timings_ms;
  return j;
}

EpisodeTrace run_episode(std::string_view query, const PipelineConfig& config, const Resources& res,
                         std::string_view style) {
  EpisodeTrace t;
  t.query = std::string(query);
  t.style = std::string(style);
  t.config = config;
  StageTimer total(t.timings_ms, "total");
  try {
    config.validate();
    if (!res.snapshot) throw Error(Errc::Config, "no store snapshot");
    if (!res.backend) throw Error(Errc::Config, "no LLM backend");
    const sql::Snapshot& snap = *res.snapshot;
    t.now = config.now.value_or(snapshot_now(snap));

    // (1) entities and verification probes
    if (config.enable_ner) {
      StageTimer st(t.timings_ms, "ner");
      if (!res.gazetteer) throw Error(Errc::Config, "NER enabled without a gazetteer");
      t.annotations = ner::annotate(query, *res.gazetteer);
      for (auto& p : ner::verification_queries(t.annotations)) {
        ner::ProbeOutcome out{p, std::nullopt, ""};
        try {
          out.rows = sql::execute_sql(p.sql, snap, {t.now, 10});
        } catch (const Error& e) {
          out.error = std::string(errc_name(e.code())) + ": " + e.what();
        }
        t.probes.push_back(std::move(out));
      }
      for (const auto& line : split(ner::facts_prompt(t.annotations, t.probes), '\n')) {
        if (!trim(line).empty()) t.bundle.facts.push_back(line);
      }
    }

    // (2) knowledge and rule fragments
    {
      StageTimer st(t.timings_ms, "knowledge");
      std::vector<std::string> doc_ids;
      if (res.retriever) {
        try {
          for (const auto& hit : res.retriever->retrieve(query, config.retrieval_k, t.now)) {
            t.retrieved.push_back({hit.doc->doc_id, hit.doc->title, hit.score});
            doc_ids.push_back(hit.doc->doc_id);
            t.bundle.knowledge.push_back("[" + hit.doc->doc_id + "] " + hit.doc->title + ": " + one_line(hit.doc->body));
          }
        } catch (const Error& e) {
          if (e.code() != Errc::EmptyCorpus) throw;
        }
      }
      if (res.rules) {
        const auto shapes = snap.shapes();
        for (const auto& r : *res.rules) {
          bool relevant = std::find(doc_ids.begin(), doc_ids.end(), r.doc_id) != doc_ids.end();
          for (const auto& a : t.annotations) {
            if (a.tag_path.starts_with("REGION") && iequals(a.canonical, r.zone_name)) relevant = true;
          }
          if (!relevant) continue;
          try {
            t.rule_fragments.push_back(r.rule_id + ": " + sair::print(knowledge::rule_to_predicate(r, shapes)));
          } catch (const Error&) {
            // zone missing from this snapshot; the rule cannot apply here
          }
        }
      }
      t.bundle.rules = t.rule_fragments;
    }

    t.bundle.representation = config.representation;
    t.bundle.target = config.enable_sair ? llm::Target::Sair : llm::Target::Sql;
    t.bundle.question = t.query;
    const knowledge::ToolRegistry registry;
    if (config.enable_tools) t.bundle.tools = registry.describe();
    llm::render_prompt(t.bundle);
    const knowledge::ToolContext tool_ctx{&snap, res.rules, res.retriever, t.now};

    // (3)-(6) generation, validation and rethink
    const int budget = config.enable_rethink ? config.max_rethink_iterations : 1;
    for (int i = 0; i < budget; ++i) {
      Iteration it;
      std::string reply;
      {
        StageTimer st(t.timings_ms, "llm");
        for (int tools_used = 0;; ++tools_used) {
          reply = res.backend->complete(t.bundle);
          ++t.llm_calls;
          it.replies.push_back(reply);
          std::optional<knowledge::ToolCall> call;
          if (config.enable_tools && tools_used < config.max_tool_calls) call = knowledge::parse_tool_call(reply);
          if (!call) break;
          ToolUse use{*call, json(), ""};
          try {
            use.result = registry.call(*call, tool_ctx);
          } catch (const Error& e) {
            use.error = std::string(errc_name(e.code())) + ": " + e.what();
          }
          t.bundle.turns.push_back({"assistant", reply});
          t.bundle.turns.push_back(
              {"user", use.error.empty() ? knowledge::render_tool_result(*call, use.result)
                                         : "Tool " + call->tool + " failed: " + use.error + "\n"});
          it.tools.push_back(std::move(use));
        }
      }
      it.draft = extract_draft(reply);
      {
        StageTimer st(t.timings_ms, "validate");
        it.verdict = validate_draft(it.draft, config, snap, t.now, t.annotations);
      }
      const bool accepted = it.verdict.ok();
      if (!accepted && i + 1 < budget) {
        it.feedback = rethink_feedback(it.verdict, it.draft);
        t.bundle.turns.push_back({"assistant", reply});
        t.bundle.turns.push_back({"user", it.feedback});
      }
      t.iterations.push_back(std::move(it));
      if (accepted) break;
    }

    // (7) execution
    const Verdict& last = t.iterations.back().verdict;
    t.ir = last.ir;
    t.sql = last.sql;
    if (!last.ok()) {
      fail(t, last.message);
    } else {
      StageTimer st(t.timings_ms, "execute");
      t.result = sql::execute(sql::prepare(t.sql), snap, {t.now, std::nullopt});
      t.terminal = Terminal::Result;
    }
  } catch (const Error& e) {
    fail(t, std::string(errc_name(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    fail(t, std::string("internal: ") + e.what());
  }
  return t;
}

std::string SessionCache::create() {
  thread_local std::mt19937_64 gen{std::random_device{}()};
  std::string id = hex64(gen()) + hex64(gen());
  std::lock_guard lock(mu_);
  const auto now = Clock::now();
  sessions_[id] = {now, now, nullptr};
  return id;
}

bool SessionCache::touch(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return false;
  const auto now = Clock::now();
  if (now - it->second.last_active > idle_timeout_) {
    sessions_.erase(it);
    return false;
  }
  it->second.last_active = now;
  return true;
}

void SessionCache::put(const std::string& id, std::shared_ptr<const EpisodeTrace> trace) {
  std::lock_guard lock(mu_);
  auto& e = sessions_[id];
  const auto now = Clock::now();
  if (e.created == Clock::time_point{}) e.created = now;
  e.last_active = now;
  e.trace = std::move(trace);
}

std::shared_ptr<const EpisodeTrace> SessionCache::last(const std::string& id) {
  if (!touch(id)) return nullptr;
  std::lock_guard lock(mu_);
  return sessions_.at(id).trace;
}

std::size_t SessionCache::size() {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void SessionCache::expire() {
  std::lock_guard lock(mu_);
  const auto now = Clock::now();
  std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second.last_active > idle_timeout_; });
}

}  // namespace vtsql::pipeline
