#include "vtsql/model/records.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"

namespace vtsql {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::KindError, std::string("invalid field: ") + what);
}

void require_arity(const Row& row, std::size_t n, const char* table) {
  if (row.size() != n) {
    throw Error(Errc::ArityMismatch, std::string("row arity mismatch for ") + table);
  }
}

std::int64_t as_int(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return static_cast<std::int64_t>(*d);
  throw Error(Errc::KindError, "expected integer cell");
}

double as_real(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw Error(Errc::KindError, "expected real cell");
}

std::string as_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (is_null(v)) return {};
  throw Error(Errc::KindError, "expected text cell");
}

Timestamp as_ts(const Value& v) {
  if (const auto* t = std::get_if<Timestamp>(&v)) return *t;
  throw Error(Errc::KindError, "expected timestamp cell");
}

bool in_degrees(double d) { return std::isfinite(d) && d >= 0.0 && d < 360.0; }

}  // namespace

void AisRecord::validate() const {
  require(mmsi >= 100000000 && mmsi <= 999999999, "mmsi (9 digits)");
  require(lat >= -90.0 && lat <= 90.0, "lat");
  require(lon >= -180.0 && lon <= 180.0, "lon");
  require(sog >= 0.0, "sog");
  require(draft >= 0.0, "draft");
  require(length > 0.0, "length");
  require(in_degrees(cog), "cog");
  require(in_degrees(heading), "heading");
}

Row AisRecord::to_row() const {
  return {mmsi,   ship_name, callsign, imo, ship_type, length,
          width,  tonnage,   draft,    lat, lon,       sog,
          cog,    heading,   nav_status,
          eta ? Value{*eta} : Value{}, ts};
}

AisRecord AisRecord::from_row(const Row& row) {
  require_arity(row, 17, "ship_ais");
  AisRecord r;
  r.mmsi = as_int(row[0]);
  r.ship_name = as_text(row[1]);
  r.callsign = as_text(row[2]);
  r.imo = is_null(row[3]) ? 0 : as_int(row[3]);
  r.ship_type = as_text(row[4]);
  r.length = as_real(row[5]);
  r.width = as_real(row[6]);
  r.tonnage = as_real(row[7]);
  r.draft = as_real(row[8]);
  r.lat = as_real(row[9]);
  r.lon = as_real(row[10]);
  r.sog = as_real(row[11]);
  r.cog = as_real(row[12]);
  r.heading = as_real(row[13]);
  r.nav_status = as_text(row[14]);
  if (!is_null(row[15])) r.eta = as_ts(row[15]);
  r.ts = as_ts(row[16]);
  return r;
}

Row GeoShape::to_row() const {
  return {id, std::string(shape_kind_name(geometry.kind)), name,
          std::make_shared<const Geometry>(geometry), region_code, remark};
}

GeoShape GeoShape::from_row(const Row& row) {
  require_arity(row, 6, "shp_data");
  GeoShape s;
  s.id = as_int(row[0]);
  s.name = as_text(row[2]);
  const auto* g = std::get_if<GeometryPtr>(&row[3]);
  if (!g || !*g) throw Error(Errc::KindError, "expected geometry cell");
  s.geometry = **g;
  s.region_code = as_text(row[4]);
  s.remark = as_text(row[5]);
  return s;
}

void WarnRecord::validate() const {
  require(cpa_nm >= 0.0, "cpa_nm");
  require(mmsi_a != mmsi_b, "mmsi_a != mmsi_b");
  require(lat >= -90.0 && lat <= 90.0, "lat");
  require(lon >= -180.0 && lon <= 180.0, "lon");
}

Row WarnRecord::to_row() const {
  return {id, mmsi_a, name_a, mmsi_b, name_b, cpa_nm, tcpa_min, warn_level, lat, lon, ts};
}

WarnRecord WarnRecord::from_row(const Row& row) {
  require_arity(row, 11, "warn_single");
  WarnRecord w;
  w.id = as_int(row[0]);
  w.mmsi_a = as_int(row[1]);
  w.name_a = as_text(row[2]);
  w.mmsi_b = as_int(row[3]);
  w.name_b = as_text(row[4]);
  w.cpa_nm = as_real(row[5]);
  w.tcpa_min = as_real(row[6]);
  w.warn_level = as_int(row[7]);
  w.lat = as_real(row[8]);
  w.lon = as_real(row[9]);
  w.ts = as_ts(row[10]);
  return w;
}

nlohmann::json to_json(const GeoShape& s) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : s.geometry.vertices) verts.push_back({v.lat, v.lon});
  return {{"id", s.id},
          {"name", s.name},
          {"obj_type", std::string(shape_kind_name(s.obj_type()))},
          {"region_code", s.region_code},
          {"remark", s.remark},
          {"wkt", to_wkt(s.geometry)},
          {"vertices", verts}};
}

nlohmann::json to_json(const AisRecord& r) {
  nlohmann::json j{{"mmsi", r.mmsi},         {"ship_name", r.ship_name}, {"ship_type", r.ship_type},
                   {"length", r.length},     {"draft", r.draft},         {"lat", r.lat},
                   {"lon", r.lon},           {"sog", r.sog},             {"cog", r.cog},
                   {"heading", r.heading},   {"nav_status", r.nav_status},
                   {"ts", format_timestamp_sql(r.ts)}};
  j["eta"] = r.eta ? nlohmann::json(format_timestamp_sql(*r.eta)) : nlohmann::json(nullptr);
  return j;
}

}  // namespace vtsql
