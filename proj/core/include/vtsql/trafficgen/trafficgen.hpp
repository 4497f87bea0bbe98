#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/knowledge/rules.hpp"
#include "vtsql/model/records.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::trafficgen {

struct ZoneSpec {
  std::int64_t id = 0;
  std::string name;
  std::string region_code;
  std::string remark;
  std::vector<LatLon> vertices;  // one vertex for a point
};

// How a scripted vessel moves. Distances in nm along the waypoint path.
//  route:  starts at the first waypoint and ping-pongs along the path
//  arrive: reaches the last waypoint eta_minutes after NOW
//  pass:   crosses `waypoints[0]` on `bearing` at `at_minutes` after start
struct ScriptedVessel {
  std::string motion = "route";
  std::int64_t mmsi = 0;  // 0 draws one
  std::string ship_name;
  std::string ship_type;
  std::optional<double> draft;
  std::optional<double> length;
  double sog = 10;
  std::vector<LatLon> waypoints;
  double bearing = 0;
  double at_minutes = 0;
  std::optional<double> eta_minutes;
  std::string nav_status;
};

struct WarningThresholds {
  double cpa_nm = 0.5;
  double tcpa_min = 30;
};

struct ScenarioSpec {
  std::uint64_t seed = 42;
  std::size_t vessel_count = 20;
  Timestamp start;
  std::int64_t span_minutes = 360;
  std::int64_t step_minutes = 15;
  std::vector<std::pair<std::string, double>> type_mix;
  std::vector<ZoneSpec> zones;
  double traffic_lat_min = 1.12, traffic_lat_max = 1.28;
  double traffic_lon_min = 103.62, traffic_lon_max = 104.08;
  std::string anchorage_zone = "anchorage";
  double anchored_fraction = 0.1;
  double eta_fraction = 0.3;
  double ddv_draft_m = 15;
  WarningThresholds warnings;
  std::vector<ScriptedVessel> scripted;
  std::string rules_file;  // relative to the scenario file

  // SPEC_INVALID on degenerate zones, proportions not summing to 1, a step
  // that does not divide the span, or more scripted vessels than
  // vessel_count.
  void validate() const;
  Timestamp now() const { return start.plus_minutes(span_minutes); }
};

ScenarioSpec parse_scenario(const nlohmann::json& doc);
// Loads the spec; a relative rules_file is rebased onto the file's directory.
ScenarioSpec load_scenario(const std::string& path);

struct SampleLabel {
  std::int64_t mmsi = 0;
  Timestamp ts;
  std::vector<std::string> zones;       // zone names containing the position
  std::vector<std::string> violations;  // rule ids
};

struct VesselLabel {
  std::int64_t mmsi = 0;
  std::string ship_name;
  std::string ship_type;
  bool scripted = false;
  bool ddv = false;
  std::optional<double> eta_minutes;  // relative to NOW
  std::vector<std::string> zones;       // at NOW
  std::vector<std::string> violations;  // at NOW
};

struct GroundTruth {
  Timestamp now;
  std::vector<VesselLabel> vessels;  // ordered by mmsi
  std::vector<SampleLabel> samples;  // ordered by (ts, mmsi)

  const VesselLabel* find(std::string_view ship_name) const;
  nlohmann::json to_json() const;
};

struct Scenario {
  std::vector<AisRecord> latest;   // ship_ais, ordered by mmsi
  std::vector<AisRecord> samples;  // ship_ais_quarter, ordered by (ts, mmsi)
  std::vector<GeoShape> shapes;
  std::vector<WarnRecord> warnings;
  std::vector<knowledge::RuleRecord> rules;
  GroundTruth truth;

  std::map<std::string, std::vector<Row>> tables() const;
  // Publishes the four tables into the store as one snapshot.
  void load_into(sql::TableStore& store) const;
};

// Deterministic for a given spec and rule set.
Scenario generate(const ScenarioSpec& spec, std::vector<knowledge::RuleRecord> rules);

// Pairwise linear-motion CPA over each sample time; a warning when
// cpa < cpa_nm and 0 <= tcpa <= tcpa_min. Emitted once per pair and time
// with mmsi_a < mmsi_b.
std::vector<WarnRecord> generate_warnings(const std::vector<AisRecord>& samples,
                                          const WarningThresholds& thresholds);

struct Cpa {
  double cpa_nm = 0;
  double tcpa_min = 0;
  LatLon midpoint;
};

// Closed-form CPA for two reports taken at the same instant.
Cpa closest_approach(const AisRecord& a, const AisRecord& b);

// Winding-number containment in the lon/lat plane; boundary counts as
// inside. Independent of the executor's ray casting.
bool winding_contains(const std::vector<LatLon>& ring, LatLon p);

// Uniform draws built directly from 64-bit engine output so sequences are
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi);  // inclusive
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vtsql::trafficgen
