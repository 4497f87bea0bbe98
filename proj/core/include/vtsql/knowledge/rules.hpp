#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/model/records.hpp"
#include "vtsql/sair/sair.hpp"

namespace vtsql::knowledge {

enum class ConstraintType { MaxSpeed, NoEntry, TimeWindowNoEntry };

std::string_view constraint_name(ConstraintType t);

// Which vessels a rule targets. Listed criteria are alternatives (any one
// matching is enough); an empty selector targets every vessel.
struct AppliesTo {
  std::vector<std::string> ship_types;
  std::optional<double> min_draft;   // m, inclusive
  std::optional<double> min_length;  // m, inclusive

  bool empty() const { return ship_types.empty() && !min_draft && !min_length; }
  bool matches(const AisRecord& r) const;
};

struct RuleRecord {
  std::string rule_id;
  std::string zone_name;
  AppliesTo applies_to;
  ConstraintType constraint = ConstraintType::MaxSpeed;
  double max_speed_kn = 0;          // MAX_SPEED
  std::optional<Timestamp> from;    // TIME_WINDOW_NO_ENTRY
  std::optional<Timestamp> to;
  std::string doc_id;
  std::string summary;

  // Reference semantics, evaluated directly on a record. `inside` is the
  // caller's zone membership for the record's position.
  bool violated_by(const AisRecord& r, bool inside) const;
};

// Parses and validates a rules document:
// {"rules": [{"rule_id", "zone", "applies_to": {...}, "constraint": {...},
//             "doc_id", "summary"}]}
// Throws CONFIG on malformed input.
std::vector<RuleRecord> parse_rules(const nlohmann::json& doc);
std::vector<RuleRecord> load_rules(const std::string& path);
nlohmann::json to_json(const RuleRecord& r);

// Checks every zone_name against the shapes; UNKNOWN_ZONE for a missing
// name, NOT_A_POLYGON for a point shape.
void check_zones(const std::vector<RuleRecord>& rules, const std::vector<GeoShape>& shapes);

// SAIR predicate selecting the offending rows of ship_ais. MAX_SPEED adds
// sog > v, NO_ENTRY the applies_to selector, TIME_WINDOW_NO_ENTRY also a
// ts BETWEEN clause. UNKNOWN_ZONE when the zone is not among the shapes.
sair::Term rule_to_predicate(const RuleRecord& rule, const std::vector<GeoShape>& shapes);

// (project (mmsi ship_name) (select <predicate> (rel <table>)))
sair::SairExpr rule_query(const RuleRecord& rule, const std::vector<GeoShape>& shapes,
                          const std::string& table = "ship_ais");

}  // namespace vtsql::knowledge
