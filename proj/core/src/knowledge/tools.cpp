#include "vtsql/knowledge/tools.hpp"

#include <algorithm>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::knowledge {
namespace {

using nlohmann::json;

[[noreturn]] void arg_error(const std::string& tool, const std::string& what) {
  throw Error(Errc::ArgSchemaError, tool + ": " + what);
}

sair::Term column(const std::string& name) {
  sair::Term t;
  t.kind = sair::TermKind::Column;
  t.name = name;
  return t;
}

}  // namespace

std::optional<ToolCall> parse_tool_call(std::string_view reply) {
  std::string text = trim(reply);
  if (text.starts_with("```")) {
    const auto nl = text.find('\n');
    const auto close = text.rfind("```");
    if (nl == std::string::npos || close <= nl) return std::nullopt;
    text = trim(text.substr(nl + 1, close - nl - 1));
  }
  if (text.empty() || text.front() != '{') return std::nullopt;
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("tool") || !j["tool"].is_string()) return std::nullopt;
  ToolCall c;
  c.tool = j["tool"].get<std::string>();
  if (j.contains("args")) c.args = j["args"];
  return c;
}

sair::Term eta_window(std::int64_t minutes, std::optional<Timestamp> t0) {
  using sair::TermKind;
  auto base = [&] {
    sair::Term t;
    if (t0) {
      t.kind = TermKind::Literal;
      t.literal = *t0;
    } else {
      t.kind = TermKind::Now;
    }
    return t;
  };
  sair::Term iv;
  iv.kind = TermKind::Interval;
  iv.minutes = minutes;
  sair::Term upper;
  upper.kind = TermKind::Arith;
  upper.head = "+";
  upper.args = {base(), std::move(iv)};
  sair::Term between;
  between.kind = TermKind::Between;
  between.head = "between";
  between.args = {column("eta"), base(), std::move(upper)};
  return between;
}

ToolRegistry::ToolRegistry() {
  specs_ = {
      {"resolve_zone", "Look up a named zone or facility in shp_data.",
       {{"name", {{"type", "string"}, {"required", true}}}},
       "shape: id, name, obj_type, region_code, remark, wkt, vertices [[lat, lon], ...]"},
      {"list_rules", "Navigational rules, optionally only those for one zone, with SAIR predicates.",
       {{"zone", {{"type", "string"}, {"required", false}}}},
       "rules: [{rule_id, zone, applies_to, constraint, summary, sair}]"},
      {"eta_window", "SAIR fragment for vessels expected within the next N minutes.",
       {{"minutes", {{"type", "integer"}, {"required", true}}}, {"now", {{"type", "string"}, {"required", false}}}},
       "sair: predicate text, sql: compiled fragment"},
      {"search_knowledge", "BM25 search over the maritime knowledge corpus.",
       {{"query", {{"type", "string"}, {"required", true}}}, {"k", {{"type", "integer"}, {"required", false}}}},
       "docs: [{doc_id, kind, title, score, body}]"},
  };
}

const ToolSpec* ToolRegistry::find(std::string_view name) const {
  for (const auto& s : specs_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

json ToolRegistry::call(const ToolCall& call, const ToolContext& ctx) const {
  const ToolSpec* spec = find(call.tool);
  if (!spec) throw Error(Errc::UnknownTool, "unknown tool '" + call.tool + "'").with_token(call.tool);
  if (!call.args.is_object()) arg_error(call.tool, "args must be an object");
  for (const auto& [k, v] : call.args.items()) {
    if (!spec->parameters.contains(k)) arg_error(call.tool, "unexpected argument '" + k + "'");
  }
  for (const auto& [k, p] : spec->parameters.items()) {
    if (!call.args.contains(k)) {
      if (p.value("required", false)) arg_error(call.tool, "missing argument '" + k + "'");
      continue;
    }
    const auto& v = call.args[k];
    const std::string type = p["type"];
    const bool ok = (type == "string" && v.is_string()) || (type == "integer" && v.is_number_integer()) ||
                    (type == "number" && v.is_number());
    if (!ok) arg_error(call.tool, "argument '" + k + "' must be " + type);
  }

  if (call.tool == "resolve_zone") {
    if (!ctx.snapshot) throw Error(Errc::Config, "resolve_zone needs a snapshot");
    const std::string name = call.args["name"];
    const GeoShape* s = ctx.snapshot->find_shape(name);
    if (!s) throw Error(Errc::UnknownZone, "unknown zone '" + name + "'").with_token(name);
    return vtsql::to_json(*s);
  }
  if (call.tool == "list_rules") {
    json out = json::array();
    if (!ctx.rules) return {{"rules", out}};
    const std::string zone = call.args.value("zone", "");
    const auto shapes = ctx.snapshot ? ctx.snapshot->shapes() : std::vector<GeoShape>{};
    for (const auto& r : *ctx.rules) {
      if (!zone.empty() && !iequals(zone, r.zone_name)) continue;
      json j = to_json(r);
      j["sair"] = sair::print(rule_to_predicate(r, shapes));
      out.push_back(std::move(j));
    }
    return {{"rules", out}};
  }
  if (call.tool == "eta_window") {
    const auto minutes = call.args["minutes"].get<std::int64_t>();
    if (minutes <= 0) arg_error(call.tool, "minutes must be positive");
    std::optional<Timestamp> t0;
    if (call.args.contains("now")) {
      t0 = parse_timestamp(call.args["now"].get<std::string>());
      if (!t0) arg_error(call.tool, "malformed 'now' timestamp");
    }
    const sair::Term frag = eta_window(minutes, t0);
    return {{"sair", sair::print(frag)}, {"sql", sair::compile_predicate(frag)}};
  }
  // search_knowledge
  if (!ctx.retriever) throw Error(Errc::EmptyCorpus, "no knowledge corpus loaded");
  const auto k = static_cast<std::size_t>(std::max<std::int64_t>(1, call.args.value("k", std::int64_t{4})));
  json docs = json::array();
  for (const auto& hit : ctx.retriever->retrieve(call.args["query"].get<std::string>(), k, ctx.now)) {
    docs.push_back({{"doc_id", hit.doc->doc_id},
                    {"kind", std::string(doc_kind_name(hit.doc->kind))},
                    {"title", hit.doc->title},
                    {"score", hit.score},
                    {"body", hit.doc->body}});
  }
  return {{"docs", docs}};
}

std::string ToolRegistry::describe() const {
  std::string out;
  for (const auto& s : specs_) {
    std::vector<std::string> params;
    for (const auto& [k, p] : s.parameters.items()) {
      params.push_back(k + ": " + p["type"].get<std::string>() + (p.value("required", false) ? "" : "?"));
    }
    out += "- " + s.name + "(" + join(params, ", ") + "): " + s.description + "\n";
  }
  return out;
}

std::string render_tool_result(const ToolCall& call, const json& result) {
  return "Tool " + call.tool + " returned:\n" + result.dump(2) + "\n";
}

}  // namespace vtsql::knowledge
