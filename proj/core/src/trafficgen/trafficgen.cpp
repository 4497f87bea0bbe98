#include "vtsql/trafficgen/trafficgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/sql/geo.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::trafficgen {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(Errc::SpecInvalid, "scenario: " + what);
}

constexpr double kDeg = std::numbers::pi / 180.0;

double round_to(double x, int digits) {
  const double f = std::pow(10.0, digits);
  return std::round(x * f) / f + 0.0;  // no negative zero
}

double norm_deg(double d) {
  d = std::fmod(d, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d;
}

struct TypeProfile {
  std::string_view type;
  double len_lo, len_hi, wid_lo, wid_hi, ton_lo, ton_hi, draft_lo, draft_hi, sog_lo, sog_hi;
};

constexpr TypeProfile kProfiles[] = {
    {"VLCC", 320, 335, 58, 60, 150000, 165000, 18, 21.5, 9, 12},
    {"TANKER", 180, 250, 30, 44, 30000, 80000, 10, 14, 10, 13.5},
    {"CARGO", 150, 300, 24, 48, 20000, 90000, 8, 15.5, 10, 14},
    {"TUG", 25, 40, 8, 12, 300, 800, 3, 5.5, 5, 10},
    {"PASSENGER", 100, 250, 18, 32, 8000, 60000, 5, 8.5, 12, 18},
};

const TypeProfile& profile(std::string_view type) {
  for (const auto& p : kProfiles) {
    if (iequals(p.type, type)) return p;
  }
  return kProfiles[2];
}

constexpr std::string_view kNameA[] = {
    "OCEAN", "PACIFIC", "GOLDEN", "SILVER", "ORIENT", "CORAL", "JADE", "RIVER", "STELLAR", "PEARL",
    "MARINE", "GRAND", "NOBLE", "ROYAL", "UNITY", "HORIZON", "TROPIC", "CRIMSON", "POLAR", "SUMMIT"};
constexpr std::string_view kNameB[] = {
    "GLORY", "TRADER", "VENTURE", "FORTUNE", "HARMONY", "SPIRIT", "CROWN", "PRIDE", "VOYAGER", "LEGEND",
    "BRIDGE", "FALCON", "DOLPHIN", "HERON", "MAPLE", "LOTUS", "COMET", "RANGER", "TIDE", "BEACON"};
constexpr std::int64_t kMidPrefixes[] = {563, 564, 565, 566, 477, 412, 636, 538, 357, 371};

struct Path {
  std::vector<LatLon> pts;
  std::vector<double> cum;  // cumulative nm at each vertex
  bool pingpong = false;

  double length() const { return cum.empty() ? 0 : cum.back(); }

  static Path make(std::vector<LatLon> pts, bool pingpong) {
    Path p;
    p.pts = std::move(pts);
    p.pingpong = pingpong;
    p.cum.push_back(0);
    for (std::size_t i = 1; i < p.pts.size(); ++i) {
      p.cum.push_back(p.cum.back() + sql::st_distance(p.pts[i - 1], p.pts[i]));
    }
    return p;
  }

  // Position and course over ground at `s` nm of travel.
  std::pair<LatLon, double> at(double s) const {
    if (pts.size() == 1 || length() <= 0) return {pts.front(), 0.0};
    const double len = length();
    bool reversed = false;
    if (pingpong) {
      s = std::fmod(s, 2 * len);
      if (s < 0) s += 2 * len;
      if (s > len) {
        s = 2 * len - s;
        reversed = true;
      }
    }
    if (s <= 0) {
      const double b = sql::initial_bearing(pts[0], pts[1]);
      if (s == 0) return {pts[0], reversed ? norm_deg(b + 180) : b};
      return {sql::destination_point(pts[0], b + 180.0, -s), b};
    }
    if (s >= len) {
      const std::size_t n = pts.size();
      const double b = norm_deg(sql::initial_bearing(pts[n - 1], pts[n - 2]) + 180.0);
      if (s == len || pingpong) return {pts[n - 1], reversed ? norm_deg(b + 180) : b};
      return {sql::destination_point(pts[n - 1], b, s - len), b};
    }
    std::size_t i = 0;
    while (i + 2 < pts.size() && cum[i + 1] <= s) ++i;
    const double d = s - cum[i];
    const LatLon pos = sql::destination_point(pts[i], sql::initial_bearing(pts[i], pts[i + 1]), d);
    const double ahead = sql::initial_bearing(pos, pts[i + 1]);
    if (!reversed) return {pos, ahead};
    return {pos, sql::initial_bearing(pos, pts[i])};
  }
};

struct Vessel {
  AisRecord base;  // identity and dimensions; motion fields are filled per sample
  Path path;
  double offset_nm = 0;
  bool anchored = false;
  bool scripted = false;
  std::optional<double> eta_minutes;
  std::string nav_status;
  double heading_bias = 0;
};

std::vector<LatLon> parse_points(const json& j, const std::string& what) {
  std::vector<LatLon> out;
  if (!j.is_array()) invalid(what + " must be an array of [lat, lon]");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) invalid(what + " must be an array of [lat, lon]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

bool on_segment(LatLon a, LatLon b, LatLon p) {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  const double scale = std::max({std::fabs(b.lon - a.lon), std::fabs(b.lat - a.lat), 1e-300});
  if (std::fabs(cross) > 1e-12 * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) - 1e-12 && p.lon <= std::max(a.lon, b.lon) + 1e-12 &&
         p.lat >= std::min(a.lat, b.lat) - 1e-12 && p.lat <= std::max(a.lat, b.lat) + 1e-12;
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(engine_() % span);
}

bool winding_contains(const std::vector<LatLon>& ring, LatLon p) {
  // ring may or may not repeat its first vertex
  std::size_t n = ring.size();
  if (n > 1 && ring.front().lat == ring.back().lat && ring.front().lon == ring.back().lon) --n;
  if (n < 3) return false;
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const LatLon a = ring[i];
    const LatLon b = ring[(i + 1) % n];
    if (on_segment(a, b, p)) return true;
    const double is_left = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && is_left > 0) ++winding;
    } else if (b.lat <= p.lat && is_left < 0) {
      --winding;
    }
  }
  return winding != 0;
}

void ScenarioSpec::validate() const {
  if (vessel_count == 0) invalid("vessel_count must be positive");
  if (step_minutes <= 0 || span_minutes <= 0) invalid("span and step must be positive");
  if (span_minutes % step_minutes != 0) invalid("step_minutes must divide span_minutes");
  if (type_mix.empty()) invalid("type_mix is empty");
  double sum = 0;
  for (const auto& [type, share] : type_mix) {
    if (share < 0) invalid("negative share for " + type);
    sum += share;
  }
  if (std::fabs(sum - 1.0) > 1e-9) invalid("type_mix proportions must sum to 1");
  std::set<std::string> names;
  std::set<std::int64_t> ids;
  for (const auto& z : zones) {
    if (!names.insert(to_lower(z.name)).second) invalid("duplicate zone name " + z.name);
    if (!ids.insert(z.id).second) invalid("duplicate zone id " + std::to_string(z.id));
    try {
      if (z.vertices.size() == 1) {
        make_point(z.vertices.front());
      } else {
        make_polygon(z.vertices);
      }
    } catch (const Error& e) {
      invalid("zone " + z.name + " is degenerate: " + e.what());
    }
  }
  if (anchored_fraction > 0 && !names.count(to_lower(anchorage_zone))) {
    invalid("anchorage zone '" + anchorage_zone + "' not defined");
  }
  if (scripted.size() > vessel_count) invalid("more scripted vessels than vessel_count");
  if (!(traffic_lat_min < traffic_lat_max && traffic_lon_min < traffic_lon_max)) {
    invalid("empty traffic box");
  }
  for (const auto& s : scripted) {
    if (s.ship_name.empty()) invalid("scripted vessel without ship_name");
    if (s.sog <= 0) invalid(s.ship_name + ": sog must be positive");
    if (s.motion == "route" || s.motion == "arrive") {
      if (s.waypoints.size() < 2) invalid(s.ship_name + ": needs at least two waypoints");
    } else if (s.motion == "pass") {
      if (s.waypoints.size() != 1) invalid(s.ship_name + ": pass motion takes one crossing point");
    } else {
      invalid(s.ship_name + ": unknown motion '" + s.motion + "'");
    }
    if (s.motion == "arrive" && (!s.eta_minutes || *s.eta_minutes <= 0)) {
      invalid(s.ship_name + ": arrive motion needs a positive eta_minutes");
    }
  }
}

ScenarioSpec parse_scenario(const json& doc) {
  ScenarioSpec s;
  try {
    s.seed = doc.value("seed", s.seed);
    s.vessel_count = doc.value("vessel_count", s.vessel_count);
    const auto start = parse_timestamp(doc.value("start", "2024-05-01 00:00:00"));
    if (!start) invalid("malformed start timestamp");
    s.start = *start;
    s.span_minutes = doc.value("span_minutes", s.span_minutes);
    s.step_minutes = doc.value("step_minutes", s.step_minutes);
    if (doc.contains("type_mix")) {
      for (const auto& [k, v] : doc["type_mix"].items()) s.type_mix.emplace_back(k, v.get<double>());
    }
    if (doc.contains("traffic_box")) {
      const auto& b = doc["traffic_box"];
      s.traffic_lat_min = b.at("lat_min").get<double>();
      s.traffic_lat_max = b.at("lat_max").get<double>();
      s.traffic_lon_min = b.at("lon_min").get<double>();
      s.traffic_lon_max = b.at("lon_max").get<double>();
    }
    s.anchorage_zone = doc.value("anchorage_zone", s.anchorage_zone);
    s.anchored_fraction = doc.value("anchored_fraction", s.anchored_fraction);
    s.eta_fraction = doc.value("eta_fraction", s.eta_fraction);
    s.ddv_draft_m = doc.value("ddv_draft_m", s.ddv_draft_m);
    if (doc.contains("warnings")) {
      s.warnings.cpa_nm = doc["warnings"].value("cpa_nm", s.warnings.cpa_nm);
      s.warnings.tcpa_min = doc["warnings"].value("tcpa_min", s.warnings.tcpa_min);
    }
    s.rules_file = doc.value("rules_file", "");
    for (const auto& z : doc.value("zones", json::array())) {
      ZoneSpec zone;
      zone.id = z.at("id").get<std::int64_t>();
      zone.name = z.at("name").get<std::string>();
      zone.region_code = z.value("region_code", "");
      zone.remark = z.value("remark", "");
      zone.vertices = parse_points(z.at("vertices"), "zone " + zone.name + " vertices");
      s.zones.push_back(std::move(zone));
    }
    for (const auto& v : doc.value("scripted", json::array())) {
      ScriptedVessel sv;
      sv.motion = v.value("motion", sv.motion);
      sv.mmsi = v.value("mmsi", std::int64_t{0});
      sv.ship_name = v.value("ship_name", "");
      sv.ship_type = v.value("ship_type", "CARGO");
      if (v.contains("draft")) sv.draft = v["draft"].get<double>();
      if (v.contains("length")) sv.length = v["length"].get<double>();
      sv.sog = v.value("sog", sv.sog);
      if (v.contains("waypoints")) sv.waypoints = parse_points(v["waypoints"], sv.ship_name + " waypoints");
      sv.bearing = v.value("bearing", 0.0);
      sv.at_minutes = v.value("at_minutes", 0.0);
      if (v.contains("eta_minutes")) sv.eta_minutes = v["eta_minutes"].get<double>();
      sv.nav_status = v.value("nav_status", "");
      s.scripted.push_back(std::move(sv));
    }
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  if (s.type_mix.empty()) {
    s.type_mix = {{"CARGO", 0.35}, {"PASSENGER", 0.15}, {"TANKER", 0.2}, {"TUG", 0.15}, {"VLCC", 0.15}};
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    invalid(path + ": " + e.what());
  }
  ScenarioSpec s = parse_scenario(doc);
  if (!s.rules_file.empty() && std::filesystem::path(s.rules_file).is_relative()) {
    s.rules_file = (std::filesystem::path(path).parent_path() / s.rules_file).string();
  }
  return s;
}

const VesselLabel* GroundTruth::find(std::string_view ship_name) const {
  for (const auto& v : vessels) {
    if (iequals(v.ship_name, ship_name)) return &v;
  }
  return nullptr;
}

json GroundTruth::to_json() const {
  json vs = json::array();
  for (const auto& v : vessels) {
    vs.push_back({{"mmsi", v.mmsi},
                  {"ship_name", v.ship_name},
                  {"ship_type", v.ship_type},
                  {"scripted", v.scripted},
                  {"ddv", v.ddv},
                  {"eta_minutes", v.eta_minutes ? json(*v.eta_minutes) : json(nullptr)},
                  {"zones", v.zones},
                  {"violations", v.violations}});
  }
  json ss = json::array();
  for (const auto& s : samples) {
    ss.push_back({{"mmsi", s.mmsi},
                  {"ts", format_timestamp_iso(s.ts)},
                  {"zones", s.zones},
                  {"violations", s.violations}});
  }
  return {{"now", format_timestamp_iso(now)}, {"vessels", vs}, {"samples", ss}};
}

std::map<std::string, std::vector<Row>> Scenario::tables() const {
  std::map<std::string, std::vector<Row>> out;
  auto& ais = out["ship_ais"];
  for (const auto& r : latest) ais.push_back(r.to_row());
  auto& quarter = out["ship_ais_quarter"];
  for (const auto& r : samples) quarter.push_back(r.to_row());
  auto& shp = out["shp_data"];
  for (const auto& s : shapes) shp.push_back(s.to_row());
  auto& warn = out["warn_single"];
  for (const auto& w : warnings) warn.push_back(w.to_row());
  return out;
}

void Scenario::load_into(sql::TableStore& store) const { store.replace(tables()); }

Cpa closest_approach(const AisRecord& a, const AisRecord& b) {
  const double phi = 0.5 * (a.lat + b.lat) * kDeg;
  const double kx = 60.0 * std::cos(phi);
  const double rx = (b.lon - a.lon) * kx;
  const double ry = (b.lat - a.lat) * 60.0;
  const double vax = a.sog * std::sin(a.cog * kDeg), vay = a.sog * std::cos(a.cog * kDeg);
  const double vbx = b.sog * std::sin(b.cog * kDeg), vby = b.sog * std::cos(b.cog * kDeg);
  const double vx = vbx - vax, vy = vby - vay;
  const double vv = vx * vx + vy * vy;
  const double t = vv < 1e-12 ? 0.0 : -(rx * vx + ry * vy) / vv;  // hours
  const double cx = rx + vx * t, cy = ry + vy * t;
  Cpa out;
  out.cpa_nm = std::hypot(cx, cy);
  out.tcpa_min = t * 60.0;
  const double mx = 0.5 * (vax * t + rx + vbx * t);
  const double my = 0.5 * (vay * t + ry + vby * t);
  out.midpoint = {a.lat + my / 60.0, a.lon + mx / kx};
  return out;
}

std::vector<WarnRecord> generate_warnings(const std::vector<AisRecord>& samples,
                                          const WarningThresholds& thresholds) {
  std::map<Timestamp, std::vector<const AisRecord*>> by_time;
  for (const auto& s : samples) by_time[s.ts].push_back(&s);
  std::vector<WarnRecord> out;
  for (auto& [ts, group] : by_time) {
    std::sort(group.begin(), group.end(),
              [](const AisRecord* x, const AisRecord* y) { return x->mmsi < y->mmsi; });
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const AisRecord& a = *group[i];
        const AisRecord& b = *group[j];
        if (a.mmsi == b.mmsi) continue;
        // two vessels at rest never develop a closing situation
        if (a.sog == 0 && b.sog == 0) continue;
        const Cpa c = closest_approach(a, b);
        if (!(c.cpa_nm < thresholds.cpa_nm) || c.tcpa_min < 0 || c.tcpa_min > thresholds.tcpa_min) continue;
        WarnRecord w;
        w.id = static_cast<std::int64_t>(out.size()) + 1;
        w.mmsi_a = a.mmsi;
        w.name_a = a.ship_name;
        w.mmsi_b = b.mmsi;
        w.name_b = b.ship_name;
        w.cpa_nm = round_to(c.cpa_nm, 3);
        w.tcpa_min = round_to(c.tcpa_min, 1);
        w.warn_level = c.cpa_nm < 0.2 ? 3 : (c.cpa_nm < 0.35 ? 2 : 1);
        w.lat = round_to(std::clamp(c.midpoint.lat, -90.0, 90.0), 6);
        w.lon = round_to(std::clamp(c.midpoint.lon, -180.0, 180.0), 6);
        w.ts = ts;
        out.push_back(std::move(w));
      }
    }
  }
  return out;
}

Scenario generate(const ScenarioSpec& spec, std::vector<knowledge::RuleRecord> rules) {
  spec.validate();
  Rng rng(spec.seed);
  Scenario sc;
  for (const auto& z : spec.zones) {
    GeoShape g;
    g.id = z.id;
    g.name = z.name;
    g.geometry = z.vertices.size() == 1 ? make_point(z.vertices.front()) : make_polygon(z.vertices);
    g.region_code = z.region_code;
    g.remark = z.remark;
    sc.shapes.push_back(std::move(g));
  }
  std::sort(sc.shapes.begin(), sc.shapes.end(), [](const GeoShape& a, const GeoShape& b) { return a.id < b.id; });
  knowledge::check_zones(rules, sc.shapes);
  sc.rules = std::move(rules);

  const GeoShape* anchorage = nullptr;
  for (const auto& s : sc.shapes) {
    if (iequals(s.name, spec.anchorage_zone) && s.obj_type() == ShapeKind::Polygon) anchorage = &s;
  }

  std::set<std::int64_t> used_mmsi;
  std::set<std::string> used_names, used_soundex;
  auto draw_mmsi = [&] {
    for (;;) {
      const auto prefix = kMidPrefixes[rng.integer(0, std::size(kMidPrefixes) - 1)];
      const std::int64_t m = prefix * 1000000 + rng.integer(0, 999999);
      if (used_mmsi.insert(m).second) return m;
    }
  };
  auto draw_callsign = [&] {
    std::string cs = "9V";
    for (int i = 0; i < 3; ++i) cs += static_cast<char>('A' + rng.integer(0, 25));
    cs += static_cast<char>('0' + rng.integer(0, 9));
    return cs;
  };
  auto fill_dims = [&](AisRecord& r, const TypeProfile& p) {
    r.length = round_to(rng.uniform(p.len_lo, p.len_hi), 1);
    r.width = round_to(rng.uniform(p.wid_lo, p.wid_hi), 1);
    r.tonnage = std::round(rng.uniform(p.ton_lo, p.ton_hi));
    r.draft = round_to(rng.uniform(p.draft_lo, p.draft_hi), 1);
  };

  std::vector<Vessel> fleet;
  for (const auto& s : spec.scripted) {
    Vessel v;
    v.scripted = true;
    v.base.mmsi = s.mmsi ? s.mmsi : draw_mmsi();
    if (s.mmsi && !used_mmsi.insert(s.mmsi).second) invalid("duplicate scripted mmsi");
    v.base.ship_name = s.ship_name;
    v.base.ship_type = s.ship_type;
    v.base.callsign = draw_callsign();
    v.base.imo = rng.integer(9000000, 9899999);
    fill_dims(v.base, profile(s.ship_type));
    if (s.draft) v.base.draft = *s.draft;
    if (s.length) v.base.length = *s.length;
    v.eta_minutes = s.eta_minutes;
    v.nav_status = s.nav_status.empty() ? "UNDER WAY USING ENGINE" : s.nav_status;
    v.base.sog = s.sog;
    v.heading_bias = rng.uniform(-2.0, 2.0);
    const double span_nm = s.sog * static_cast<double>(spec.span_minutes) / 60.0;
    if (s.motion == "route") {
      v.path = Path::make(s.waypoints, true);
    } else if (s.motion == "arrive") {
      v.path = Path::make(s.waypoints, false);
      v.offset_nm = v.path.length() - s.sog * *s.eta_minutes / 60.0 - span_nm;
    } else {
      const LatLon x = s.waypoints.front();
      const LatLon a = sql::destination_point(x, s.bearing + 180.0, s.sog * s.at_minutes / 60.0);
      const LatLon b = sql::destination_point(
          x, s.bearing, s.sog * (static_cast<double>(spec.span_minutes) - s.at_minutes) / 60.0 + 5.0);
      v.path = Path::make({a, b}, false);
    }
    used_names.insert(to_upper(s.ship_name));
    used_soundex.insert(sql::soundex(s.ship_name));
    fleet.push_back(std::move(v));
  }

  const std::size_t random_count = spec.vessel_count - spec.scripted.size();
  for (std::size_t i = 0; i < random_count; ++i) {
    Vessel v;
    double pick = rng.uniform();
    std::string type = spec.type_mix.back().first;
    for (const auto& [t, share] : spec.type_mix) {
      if (pick < share) {
        type = t;
        break;
      }
      pick -= share;
    }
    const TypeProfile& p = profile(type);
    v.base.mmsi = draw_mmsi();
    // large fleets exhaust the name pool; fall back to a numeric suffix
    for (int attempt = 0;; ++attempt) {
      std::string name = std::string(kNameA[rng.integer(0, std::size(kNameA) - 1)]) + " " +
                         std::string(kNameB[rng.integer(0, std::size(kNameB) - 1)]);
      if (attempt >= 64) name += " " + std::to_string(attempt);
      if (used_names.count(name) || used_soundex.count(sql::soundex(name))) continue;
      used_names.insert(name);
      v.base.ship_name = std::move(name);
      break;
    }
    v.base.ship_type = type;
    v.base.callsign = draw_callsign();
    v.base.imo = rng.integer(9000000, 9899999);
    fill_dims(v.base, p);
    v.heading_bias = rng.uniform(-2.0, 2.0);
    if (anchorage && rng.uniform() < spec.anchored_fraction) {
      double lat_lo = 90, lat_hi = -90, lon_lo = 180, lon_hi = -180;
      for (const auto& q : anchorage->geometry.vertices) {
        lat_lo = std::min(lat_lo, q.lat), lat_hi = std::max(lat_hi, q.lat);
        lon_lo = std::min(lon_lo, q.lon), lon_hi = std::max(lon_hi, q.lon);
      }
      LatLon pos;
      do {
        pos = {rng.uniform(lat_lo, lat_hi), rng.uniform(lon_lo, lon_hi)};
      } while (!winding_contains(anchorage->geometry.vertices, pos));
      v.anchored = true;
      v.path = Path::make({pos}, false);
      v.base.sog = 0;
      v.base.cog = round_to(rng.uniform(0, 360), 1);
      v.nav_status = "AT ANCHOR";
    } else {
      std::vector<LatLon> wps;
      const int n = static_cast<int>(rng.integer(2, 4));
      for (int k = 0; k < n; ++k) {
        wps.push_back({rng.uniform(spec.traffic_lat_min, spec.traffic_lat_max),
                       rng.uniform(spec.traffic_lon_min, spec.traffic_lon_max)});
      }
      v.path = Path::make(std::move(wps), true);
      v.base.sog = round_to(rng.uniform(p.sog_lo, p.sog_hi), 1);
      v.offset_nm = rng.uniform(0, v.path.length());
      v.nav_status = "UNDER WAY USING ENGINE";
    }
    if (rng.uniform() < spec.eta_fraction) v.eta_minutes = static_cast<double>(rng.integer(75, 600));
    fleet.push_back(std::move(v));
  }
  std::sort(fleet.begin(), fleet.end(), [](const Vessel& a, const Vessel& b) { return a.base.mmsi < b.base.mmsi; });

  const Timestamp now = spec.now();
  const std::int64_t steps = spec.span_minutes / spec.step_minutes;
  auto zones_of = [&](LatLon pos) {
    std::vector<std::string> out;
    for (const auto& s : sc.shapes) {
      if (s.obj_type() == ShapeKind::Polygon && winding_contains(s.geometry.vertices, pos)) out.push_back(s.name);
    }
    return out;
  };
  auto violations_of = [&](const AisRecord& r, const std::vector<std::string>& zones) {
    std::vector<std::string> out;
    for (const auto& rule : sc.rules) {
      const bool inside = std::any_of(zones.begin(), zones.end(),
                                      [&](const std::string& z) { return iequals(z, rule.zone_name); });
      if (rule.violated_by(r, inside)) out.push_back(rule.rule_id);
    }
    return out;
  };

  for (std::int64_t k = 0; k <= steps; ++k) {
    const Timestamp ts = spec.start.plus_minutes(k * spec.step_minutes);
    const double hours = static_cast<double>(k * spec.step_minutes) / 60.0;
    for (const auto& v : fleet) {
      AisRecord r = v.base;
      r.ts = ts;
      r.nav_status = v.nav_status;
      if (v.anchored) {
        r.lat = round_to(v.path.pts.front().lat, 6);
        r.lon = round_to(v.path.pts.front().lon, 6);
        r.heading = r.cog;
      } else {
        const auto [pos, course] = v.path.at(v.offset_nm + v.base.sog * hours);
        r.lat = round_to(pos.lat, 6);
        r.lon = round_to(pos.lon, 6);
        r.cog = round_to(norm_deg(course), 1);
        if (r.cog >= 360.0) r.cog = 0;
        r.heading = round_to(norm_deg(course + v.heading_bias), 1);
        if (r.heading >= 360.0) r.heading = 0;
      }
      if (v.eta_minutes) r.eta = Timestamp{now.seconds + static_cast<std::int64_t>(std::llround(*v.eta_minutes * 60))};
      r.validate();
      SampleLabel label;
      label.mmsi = r.mmsi;
      label.ts = ts;
      label.zones = zones_of({r.lat, r.lon});
      label.violations = violations_of(r, label.zones);
      sc.truth.samples.push_back(std::move(label));
      sc.samples.push_back(std::move(r));
    }
  }
  for (std::size_t i = sc.samples.size() - fleet.size(); i < sc.samples.size(); ++i) {
    sc.latest.push_back(sc.samples[i]);
  }
  sc.truth.now = now;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& v = fleet[i];
    const auto& last = sc.truth.samples[sc.truth.samples.size() - fleet.size() + i];
    VesselLabel l;
    l.mmsi = v.base.mmsi;
    l.ship_name = v.base.ship_name;
    l.ship_type = v.base.ship_type;
    l.scripted = v.scripted;
    l.ddv = v.base.draft >= spec.ddv_draft_m;
    l.eta_minutes = v.eta_minutes;
    l.zones = last.zones;
    l.violations = last.violations;
    sc.truth.vessels.push_back(std::move(l));
  }
  sc.warnings = generate_warnings(sc.samples, spec.warnings);
  return sc;
}

}  // namespace vtsql::trafficgen
