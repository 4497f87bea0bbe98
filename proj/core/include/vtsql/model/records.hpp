#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/model/value.hpp"

namespace vtsql {

using Row = std::vector<Value>;

// One vessel report; the 17 columns of ship_ais / ship_ais_quarter.
struct AisRecord {
  std::int64_t mmsi = 0;
  std::string ship_name;
  std::string callsign;
  std::int64_t imo = 0;
  std::string ship_type;
  double length = 0;   // m
  double width = 0;    // m
  double tonnage = 0;  // GT
  double draft = 0;    // m
  double lat = 0;
  double lon = 0;
  double sog = 0;      // kn
  double cog = 0;      // deg
  double heading = 0;  // deg
  std::string nav_status;
  std::optional<Timestamp> eta;
  Timestamp ts;

  // Throws KIND_ERROR naming the first violated field.
  void validate() const;
  Row to_row() const;
  static AisRecord from_row(const Row& row);
};

// A shp_data row.
struct GeoShape {
  std::int64_t id = 0;
  std::string name;
  Geometry geometry;
  std::string region_code;
  std::string remark;

  ShapeKind obj_type() const { return geometry.kind; }
  Row to_row() const;
  static GeoShape from_row(const Row& row);
};

// A warn_single row.
struct WarnRecord {
  std::int64_t id = 0;
  std::int64_t mmsi_a = 0;
  std::string name_a;
  std::int64_t mmsi_b = 0;
  std::string name_b;
  double cpa_nm = 0;
  double tcpa_min = 0;
  std::int64_t warn_level = 0;
  double lat = 0;
  double lon = 0;
  Timestamp ts;

  void validate() const;
  Row to_row() const;
  static WarnRecord from_row(const Row& row);
};

// Map-facing documents: shapes carry WKT plus [[lat, lon], ...] vertices.
nlohmann::json to_json(const GeoShape& s);
nlohmann::json to_json(const AisRecord& r);

}  // namespace vtsql
