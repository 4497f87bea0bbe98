#include "vtsql/knowledge/rules.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::knowledge {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::Config, "rules: " + what); }

sair::Term column(const std::string& name) {
  sair::Term t;
  t.kind = sair::TermKind::Column;
  t.name = name;
  return t;
}

template <typename V>
sair::Term literal(V v) {
  sair::Term t;
  t.kind = sair::TermKind::Literal;
  t.literal = Value{std::move(v)};
  return t;
}

sair::Term node(sair::TermKind kind, std::string head, std::vector<sair::Term> args) {
  sair::Term t;
  t.kind = kind;
  t.head = std::move(head);
  t.args = std::move(args);
  return t;
}

Timestamp parse_ts_field(const json& j, const char* field, const std::string& rule_id) {
  if (!j.contains(field) || !j[field].is_string()) bad(rule_id + ": constraint needs '" + field + "'");
  const auto ts = parse_timestamp(j[field].get<std::string>());
  if (!ts) bad(rule_id + ": malformed timestamp in '" + field + "'");
  return *ts;
}

}  // namespace

std::string_view constraint_name(ConstraintType t) {
  switch (t) {
    case ConstraintType::MaxSpeed: return "MAX_SPEED";
    case ConstraintType::NoEntry: return "NO_ENTRY";
    case ConstraintType::TimeWindowNoEntry: return "TIME_WINDOW_NO_ENTRY";
  }
  return "?";
}

bool AppliesTo::matches(const AisRecord& r) const {
  if (empty()) return true;
  const bool type_hit = std::any_of(ship_types.begin(), ship_types.end(),
                                    [&](const std::string& t) { return iequals(t, r.ship_type); });
  return type_hit || (min_draft && r.draft >= *min_draft) || (min_length && r.length >= *min_length);
}

bool RuleRecord::violated_by(const AisRecord& r, bool inside) const {
  if (!inside || !applies_to.matches(r)) return false;
  switch (constraint) {
    case ConstraintType::MaxSpeed: return r.sog > max_speed_kn;
    case ConstraintType::NoEntry: return true;
    case ConstraintType::TimeWindowNoEntry: return r.ts >= *from && r.ts <= *to;
  }
  return false;
}

std::vector<RuleRecord> parse_rules(const json& doc) {
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    bad("expected an object with a 'rules' array");
  }
  std::vector<RuleRecord> out;
  std::set<std::string> ids;
  for (const auto& j : doc["rules"]) {
    RuleRecord r;
    r.rule_id = j.value("rule_id", "");
    if (r.rule_id.empty()) bad("rule without rule_id");
    if (!ids.insert(r.rule_id).second) bad("duplicate rule_id " + r.rule_id);
    r.zone_name = j.value("zone", "");
    if (r.zone_name.empty()) bad(r.rule_id + ": missing zone");
    r.doc_id = j.value("doc_id", "");
    r.summary = j.value("summary", "");
    if (j.contains("applies_to")) {
      const auto& a = j["applies_to"];
      if (a.contains("ship_types")) r.applies_to.ship_types = a["ship_types"].get<std::vector<std::string>>();
      if (a.contains("min_draft") && !a["min_draft"].is_null()) r.applies_to.min_draft = a["min_draft"].get<double>();
      if (a.contains("min_length") && !a["min_length"].is_null()) r.applies_to.min_length = a["min_length"].get<double>();
      if ((r.applies_to.min_draft && *r.applies_to.min_draft <= 0) ||
          (r.applies_to.min_length && *r.applies_to.min_length <= 0)) {
        bad(r.rule_id + ": thresholds must be positive");
      }
    }
    if (!j.contains("constraint") || !j["constraint"].is_object()) bad(r.rule_id + ": missing constraint");
    const auto& c = j["constraint"];
    const std::string type = c.value("type", "");
    if (type == "MAX_SPEED") {
      r.constraint = ConstraintType::MaxSpeed;
      r.max_speed_kn = c.value("knots", 0.0);
      if (r.max_speed_kn <= 0) bad(r.rule_id + ": MAX_SPEED needs positive knots");
    } else if (type == "NO_ENTRY") {
      r.constraint = ConstraintType::NoEntry;
    } else if (type == "TIME_WINDOW_NO_ENTRY") {
      r.constraint = ConstraintType::TimeWindowNoEntry;
      r.from = parse_ts_field(c, "from", r.rule_id);
      r.to = parse_ts_field(c, "to", r.rule_id);
      if (!(*r.from < *r.to)) bad(r.rule_id + ": empty time window");
    } else {
      bad(r.rule_id + ": unknown constraint type '" + type + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RuleRecord> load_rules(const std::string& path) {
  try {
    return parse_rules(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

json to_json(const RuleRecord& r) {
  json applies = json::object();
  applies["ship_types"] = r.applies_to.ship_types;
  applies["min_draft"] = r.applies_to.min_draft ? json(*r.applies_to.min_draft) : json(nullptr);
  applies["min_length"] = r.applies_to.min_length ? json(*r.applies_to.min_length) : json(nullptr);
  json c = {{"type", std::string(constraint_name(r.constraint))}};
  if (r.constraint == ConstraintType::MaxSpeed) c["knots"] = r.max_speed_kn;
  if (r.constraint == ConstraintType::TimeWindowNoEntry) {
    c["from"] = format_timestamp_sql(*r.from);
    c["to"] = format_timestamp_sql(*r.to);
  }
  return {{"rule_id", r.rule_id}, {"zone", r.zone_name}, {"applies_to", applies},
          {"constraint", c},      {"doc_id", r.doc_id},  {"summary", r.summary}};
}

void check_zones(const std::vector<RuleRecord>& rules, const std::vector<GeoShape>& shapes) {
  for (const auto& r : rules) {
    const auto it = std::find_if(shapes.begin(), shapes.end(),
                                 [&](const GeoShape& s) { return iequals(s.name, r.zone_name); });
    if (it == shapes.end()) {
      throw Error(Errc::UnknownZone, "rule " + r.rule_id + " names unknown zone '" + r.zone_name + "'")
          .with_token(r.zone_name);
    }
    if (it->obj_type() != ShapeKind::Polygon) {
      throw Error(Errc::NotAPolygon, "rule " + r.rule_id + " zone '" + r.zone_name + "' is not a polygon");
    }
  }
}

sair::Term rule_to_predicate(const RuleRecord& rule, const std::vector<GeoShape>& shapes) {
  check_zones({rule}, shapes);
  using sair::TermKind;
  std::vector<sair::Term> conj;

  sair::Term contains;
  contains.kind = TermKind::Contains;
  contains.head = "st_contains";
  contains.shape.name = rule.zone_name;
  contains.args = {column("lat"), column("lon")};
  conj.push_back(std::move(contains));

  if (rule.constraint == ConstraintType::MaxSpeed) {
    conj.push_back(node(TermKind::Compare, ">", {column("sog"), literal(rule.max_speed_kn)}));
  }
  if (!rule.applies_to.empty()) {
    std::vector<sair::Term> any;
    const auto& types = rule.applies_to.ship_types;
    if (types.size() == 1) {
      any.push_back(node(TermKind::Compare, "=", {column("ship_type"), literal(types.front())}));
    } else if (types.size() > 1) {
      std::vector<sair::Term> args{column("ship_type")};
      for (const auto& t : types) args.push_back(literal(t));
      any.push_back(node(TermKind::In, "in", std::move(args)));
    }
    if (rule.applies_to.min_draft) {
      any.push_back(node(TermKind::Compare, ">=", {column("draft"), literal(*rule.applies_to.min_draft)}));
    }
    if (rule.applies_to.min_length) {
      any.push_back(node(TermKind::Compare, ">=", {column("length"), literal(*rule.applies_to.min_length)}));
    }
    conj.push_back(any.size() == 1 ? std::move(any.front()) : node(TermKind::Logic, "or", std::move(any)));
  }
  if (rule.constraint == ConstraintType::TimeWindowNoEntry) {
    conj.push_back(node(TermKind::Between, "between", {column("ts"), literal(*rule.from), literal(*rule.to)}));
  }
  if (conj.size() == 1) return std::move(conj.front());
  return node(TermKind::Logic, "and", std::move(conj));
}

sair::SairExpr rule_query(const RuleRecord& rule, const std::vector<GeoShape>& shapes,
                          const std::string& table) {
  sair::Node rel;
  rel.kind = sair::NodeKind::Rel;
  rel.table = table;
  sair::Node sel;
  sel.kind = sair::NodeKind::Select;
  sel.pred = rule_to_predicate(rule, shapes);
  sel.children.push_back(std::move(rel));
  sair::Node proj;
  proj.kind = sair::NodeKind::Project;
  proj.columns = {column("mmsi"), column("ship_name")};
  proj.children.push_back(std::move(sel));
  // Resolve bindings through the canonical text.
  return sair::parse_sair(sair::print(proj));
}

}  // namespace vtsql::knowledge
