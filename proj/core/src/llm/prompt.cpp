#include <cctype>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/llm/llm.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::llm {
namespace {

std::string sql_type(ColumnKind k) {
  switch (k) {
    case ColumnKind::Integer: return "INTEGER";
    case ColumnKind::Real: return "REAL";
    case ColumnKind::Text: return "TEXT";
    case ColumnKind::Timestamp: return "TIMESTAMP";
    case ColumnKind::Geometry: return "GEOMETRY";
  }
  return "TEXT";
}

std::string kind_word(ColumnKind k) {
  switch (k) {
    case ColumnKind::Integer: return "an integer";
    case ColumnKind::Real: return "a real number";
    case ColumnKind::Text: return "text";
    case ColumnKind::Timestamp: return "a timestamp";
    case ColumnKind::Geometry: return "a geometry";
  }
  return "text";
}

std::string basic(const SchemaRegistry& schema) {
  std::string out;
  for (const auto& t : schema.tables()) {
    std::vector<std::string> cols;
    for (const auto& c : t.columns) cols.push_back(c.name);
    out += t.name + "(" + join(cols, ", ") + ")\n";
  }
  return out;
}

std::string code(const SchemaRegistry& schema) {
  std::string out;
  for (const auto& t : schema.tables()) {
    out += "CREATE TABLE " + t.name + " (\n";
    for (const auto& c : t.columns) out += "  " + c.name + " " + sql_type(c.kind) + ",\n";
    out += "  PRIMARY KEY (" + join(t.key_columns, ", ") + ")\n);\n";
  }
  return out;
}

std::string markdown(const SchemaRegistry& schema) {
  std::string out;
  bool first = true;
  for (const auto& t : schema.tables()) {
    if (!first) out += "\n";
    first = false;
    out += "### " + t.name + "\n\n" + t.description + "\n\n| column | kind |\n|---|---|\n";
    for (const auto& c : t.columns) out += "| " + c.name + " | " + std::string(column_kind_name(c.kind)) + " |\n";
  }
  return out;
}

std::string alpaca(const SchemaRegistry& schema) {
  return "### Instruction:\n"
         "Translate the question into a query over the tables described in the input.\n\n"
         "### Input:\n" +
         basic(schema) + "\n### Response:\n";
}

std::string text(const SchemaRegistry& schema) {
  std::string out;
  for (const auto& t : schema.tables()) {
    std::string desc = t.description;
    // "Latest ..." reads as "latest ...", but "AIS ..." stays
    if (desc.size() > 1 && std::islower(static_cast<unsigned char>(desc[1]))) {
      desc[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(desc[0])));
    }
    out += "Table " + t.name + " holds " + desc;
    std::vector<std::string> cols;
    for (const auto& c : t.columns) cols.push_back(c.name + " (" + kind_word(c.kind) + ")");
    out += " Its columns are " + join(cols, ", ") + ".";
    out += " It is keyed by " + join(t.key_columns, ", ") + ".\n";
  }
  return out;
}

constexpr std::string_view kSairGuide =
    "Answer with a single SAIR expression and nothing else. SAIR is an "
    "s-expression relational algebra:\n"
    "  (project (col ...) REL)      root only\n"
    "  (select PRED REL)\n"
    "  (join PRED REL REL)\n"
    "  (rel table [alias])\n"
    "Predicates: (and P P ...) (or P P ...) (not P) (= a b) (<> a b) (< a b) "
    "(> a b) (<= a b) (>= a b) (like col 'pat') (in col v ...) "
    "(between x lo hi) (is_null col).\n"
    "Values: column names (alias.col when joined), numbers, 'text', "
    "(ts 'YYYY-MM-DD HH:MM:SS'), (now), (+ (now) (minutes n)).\n"
    "Spatial: (st_contains (shape 'zone name') (lat lon)).\n"
    "Instead of answering you may call one tool by replying with a JSON "
    "object {\"tool\": name, \"args\": {...}}.\n";

constexpr std::string_view kSqlGuide =
    "Answer with a single SQL SELECT statement and nothing else. Supported: "
    "SELECT [DISTINCT] ... FROM ... [JOIN ... ON ...] [WHERE ...] "
    "[ORDER BY ...] [LIMIT n]; functions ST_CONTAINS(geometry, POINT(lat, lon)), "
    "ST_DISTANCE(POINT(a, b), POINT(c, d)) in nautical miles, NOW(), "
    "INTERVAL n MINUTE, SOUNDS_LIKE(a, b); a scalar subquery such as "
    "(SELECT geometry FROM shp_data WHERE name = 'strait') may supply a zone.\n"
    "Instead of answering you may call one tool by replying with a JSON "
    "object {\"tool\": name, \"args\": {...}}.\n";

}  // namespace

std::string_view representation_name(Representation r) {
  switch (r) {
    case Representation::Basic: return "BASIC";
    case Representation::Code: return "CODE";
    case Representation::Markdown: return "MARKDOWN";
    case Representation::Alpaca: return "ALPACA";
    case Representation::Text: return "TEXT";
  }
  return "?";
}

Representation parse_representation(std::string_view name) {
  for (auto r : all_representations()) {
    if (iequals(name, representation_name(r))) return r;
  }
  throw Error(Errc::Config, "unknown prompt representation '" + std::string(name) + "'");
}

const std::vector<Representation>& all_representations() {
  static const std::vector<Representation> all{Representation::Basic, Representation::Code,
                                               Representation::Markdown, Representation::Alpaca,
                                               Representation::Text};
  return all;
}

std::string render_schema(const SchemaRegistry& schema, Representation r) {
  switch (r) {
    case Representation::Basic: return basic(schema);
    case Representation::Code: return code(schema);
    case Representation::Markdown: return markdown(schema);
    case Representation::Alpaca: return alpaca(schema);
    case Representation::Text: return text(schema);
  }
  return basic(schema);
}

std::string_view target_name(Target t) { return t == Target::Sair ? "SAIR" : "SQL"; }

std::vector<ChatMessage> PromptBundle::messages() const {
  std::vector<ChatMessage> out{{"system", system}, {"user", user}};
  out.insert(out.end(), turns.begin(), turns.end());
  return out;
}

nlohmann::json PromptBundle::to_json() const {
  nlohmann::json turns_json = nlohmann::json::array();
  for (const auto& m : turns) turns_json.push_back({{"role", m.role}, {"content", m.content}});
  return {{"representation", std::string(representation_name(representation))},
          {"target", std::string(target_name(target))},
          {"question", question},
          {"facts", facts},
          {"knowledge", knowledge},
          {"rules", rules},
          {"system", system},
          {"user", user},
          {"turns", turns_json}};
}

void render_prompt(PromptBundle& b, const SchemaRegistry& schema) {
  b.schema_block = render_schema(schema, b.representation);
  b.system =
      "You translate vessel traffic questions from VTS operators into database queries.\n" +
      std::string(b.target == Target::Sair ? kSairGuide : kSqlGuide);
  std::string u = "Database schema:\n" + b.schema_block;
  if (!b.facts.empty()) {
    u += "\nFacts about entities in the question:\n";
    for (const auto& f : b.facts) u += f + "\n";
  }
  if (!b.knowledge.empty()) {
    u += "\nDomain knowledge:\n";
    for (const auto& k : b.knowledge) u += k + "\n";
  }
  if (!b.rules.empty()) {
    u += "\nRule predicates:\n";
    for (const auto& r : b.rules) u += r + "\n";
  }
  if (!b.tools.empty()) u += "\nTools:\n" + b.tools;
  u += "\nQuestion: " + b.question + "\n";
  b.user = std::move(u);
}

}  // namespace vtsql::llm
