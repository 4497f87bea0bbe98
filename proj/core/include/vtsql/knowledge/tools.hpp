#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtsql/knowledge/corpus.hpp"
#include "vtsql/knowledge/rules.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::knowledge {

struct ToolSpec {
  std::string name;
  std::string description;
  nlohmann::json parameters;  // {"name": {"type": "string"|"integer"|"number", "required": bool}}
  nlohmann::json result;      // informal description of the result document
};

struct ToolContext {
  const sql::Snapshot* snapshot = nullptr;
  const std::vector<RuleRecord>* rules = nullptr;
  const Retriever* retriever = nullptr;
  Timestamp now{};
};

struct ToolCall {
  std::string tool;
  nlohmann::json args = nlohmann::json::object();
};

// Recognizes {"tool": name, "args": {...}} possibly wrapped in a ```json
// fence. Anything else is not a tool call.
std::optional<ToolCall> parse_tool_call(std::string_view reply);

// SAIR temporal fragment: eta between t0 and t0 + minutes, with t0 the
// query's NOW() when not given.
sair::Term eta_window(std::int64_t minutes, std::optional<Timestamp> t0 = std::nullopt);

class ToolRegistry {
 public:
  ToolRegistry();

  const std::vector<ToolSpec>& specs() const { return specs_; }
  const ToolSpec* find(std::string_view name) const;

  // UNKNOWN_TOOL for an unregistered name, ARG_SCHEMA_ERROR for missing,
  // unexpected or mistyped arguments; tools may raise UNKNOWN_ZONE.
  nlohmann::json call(const ToolCall& call, const ToolContext& ctx) const;

  // Short listing for the system prompt.
  std::string describe() const;

 private:
  std::vector<ToolSpec> specs_;
};

// Prompt text reporting a tool result back to the model.
std::string render_tool_result(const ToolCall& call, const nlohmann::json& result);

}  // namespace vtsql::knowledge
