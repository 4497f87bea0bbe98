#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vtsql {

// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

  Timestamp plus_minutes(double minutes) const {
    return Timestamp{seconds + static_cast<std::int64_t>(minutes * 60.0)};
  }
};

// Accepts "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS" with optional
// trailing "Z", and a bare "YYYY-MM-DD".
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp_iso(Timestamp ts);  // 2024-01-02T03:04:05Z
std::string format_timestamp_sql(Timestamp ts);  // 2024-01-02 03:04:05
Timestamp make_timestamp(int year, int month, int day, int hour = 0,
                         int minute = 0, int second = 0);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

enum class ShapeKind { Point, Polygon };

std::string_view shape_kind_name(ShapeKind kind);
std::optional<ShapeKind> parse_shape_kind(std::string_view text);

// Vertex list for a point (1 vertex) or a closed simple polygon.
struct Geometry {
  ShapeKind kind = ShapeKind::Point;
  std::vector<LatLon> vertices;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

// Builds a validated geometry. Polygons are closed (first vertex appended
// at the end when missing) and rejected when self-intersecting or when
// they have fewer than three distinct vertices.
Geometry make_point(LatLon p);
Geometry make_polygon(std::vector<LatLon> vertices);

// WKT uses x = lon, y = lat.
std::string to_wkt(const Geometry& g);
Geometry parse_wkt(std::string_view text);

using GeometryPtr = std::shared_ptr<const Geometry>;

using Value = std::variant<std::monostate, std::int64_t, double, std::string,
                           Timestamp, GeometryPtr>;

inline bool is_null(const Value& v) {
  return std::holds_alternative<std::monostate>(v);
}

// Canonical text form used for result-set identity: trimmed lowercase text,
// shortest round-trip decimals (integers and integral reals render alike),
// ISO-8601 UTC timestamps, WKT geometry, "null" for NULL.
std::string normalize_value(const Value& v);

std::string format_number(double d);

// Plain rendering for display and CSV export (no case folding).
std::string display_value(const Value& v);

}  // namespace vtsql
