#include "vtsql/model/value.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql {
namespace {

// Howard Hinnant's civil-from-days / days-from-civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yy + (m <= 2));
}

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len,
                     int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

double cross(LatLon o, LatLon a, LatLon b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(LatLon p, LatLon a, LatLon b) {
  return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
         std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(LatLon a, LatLon b, LatLon c, LatLon d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

void check_coordinate(LatLon p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || p.lat < -90.0 ||
      p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
    throw Error(Errc::InvalidGeometry, "coordinate out of range");
  }
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  const std::string_view s = trim_view(text);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!parse_fixed_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' ||
      !parse_fixed_int(s, 5, 2, mo) || s[7] != '-' ||
      !parse_fixed_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  std::size_t end = 10;
  if (s.size() > 10) {
    if ((s[10] != ' ' && s[10] != 'T') || !parse_fixed_int(s, 11, 2, h) ||
        s.size() < 19 || s[13] != ':' || !parse_fixed_int(s, 14, 2, mi) ||
        s[16] != ':' || !parse_fixed_int(s, 17, 2, se)) {
      return std::nullopt;
    }
    end = 19;
    if (s.size() == 20 && (s[19] == 'Z' || s[19] == 'z')) end = 20;
  }
  if (end != s.size()) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) {
    return std::nullopt;
  }
  return make_timestamp(y, mo, d, h, mi, se);
}

Timestamp make_timestamp(int year, int month, int day, int hour, int minute,
                         int second) {
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  return Timestamp{days * 86400 + hour * 3600 + minute * 60 + second};
}

namespace {
std::string format_ts(Timestamp ts, char sep, bool zulu) {
  std::int64_t days = ts.seconds / 86400;
  std::int64_t rem = ts.seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u%c%02d:%02d:%02d%s", y,
                m, d, sep, static_cast<int>(rem / 3600),
                static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60),
                zulu ? "Z" : "");
  return buf.data();
}
}  // namespace

std::string format_timestamp_iso(Timestamp ts) { return format_ts(ts, 'T', true); }
std::string format_timestamp_sql(Timestamp ts) { return format_ts(ts, ' ', false); }

std::string_view shape_kind_name(ShapeKind kind) {
  return kind == ShapeKind::Point ? "POINT" : "POLYGON";
}

std::optional<ShapeKind> parse_shape_kind(std::string_view text) {
  const std::string u = to_upper(trim_view(text));
  if (u == "POINT") return ShapeKind::Point;
  if (u == "POLYGON") return ShapeKind::Polygon;
  return std::nullopt;
}

Geometry make_point(LatLon p) {
  check_coordinate(p);
  return Geometry{ShapeKind::Point, {p}};
}

Geometry make_polygon(std::vector<LatLon> vertices) {
  for (const auto& v : vertices) check_coordinate(v);
  if (!vertices.empty() && vertices.front() != vertices.back()) {
    vertices.push_back(vertices.front());
  }
  if (vertices.size() < 4) {
    throw Error(Errc::InvalidGeometry, "polygon needs at least 3 vertices");
  }
  const std::size_t n = vertices.size() - 1;  // edge count
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices[i] == vertices[i + 1]) {
      throw Error(Errc::InvalidGeometry, "polygon has a repeated vertex");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices[i], vertices[i + 1], vertices[j],
                             vertices[j + 1])) {
        throw Error(Errc::InvalidGeometry, "polygon is self-intersecting");
      }
    }
  }
  return Geometry{ShapeKind::Polygon, std::move(vertices)};
}

std::string to_wkt(const Geometry& g) {
  std::string out;
  auto append_xy = [&out](LatLon p) {
    out += format_number(p.lon);
    out += ' ';
    out += format_number(p.lat);
  };
  if (g.kind == ShapeKind::Point) {
    out = "POINT(";
    if (!g.vertices.empty()) append_xy(g.vertices.front());
    out += ')';
    return out;
  }
  out = "POLYGON((";
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (i) out += ", ";
    append_xy(g.vertices[i]);
  }
  out += "))";
  return out;
}

Geometry parse_wkt(std::string_view text) {
  const std::string s = to_upper(trim_view(text));
  auto fail = [&]() -> Geometry {
    throw Error(Errc::InvalidGeometry, "malformed WKT: " + std::string(text));
  };
  auto parse_coords = [&](std::string_view body) {
    std::vector<LatLon> pts;
    std::size_t i = 0;
    while (i < body.size()) {
      const std::size_t comma = body.find(',', i);
      const std::string_view part = trim_view(
          body.substr(i, comma == std::string_view::npos ? body.size() - i
                                                         : comma - i));
      std::istringstream in{std::string(part)};
      double x = 0, y = 0;
      if (!(in >> x >> y)) fail();
      std::string rest;
      if (in >> rest) fail();
      pts.push_back(LatLon{y, x});
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
    return pts;
  };
  if (s.rfind("POINT", 0) == 0) {
    const auto open = s.find('(');
    const auto close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      fail();
    auto pts = parse_coords(std::string_view(s).substr(open + 1, close - open - 1));
    if (pts.size() != 1) fail();
    return make_point(pts.front());
  }
  if (s.rfind("POLYGON", 0) == 0) {
    const auto open = s.find("((");
    const auto close = s.find("))");
    if (open == std::string::npos || close == std::string::npos || close < open)
      fail();
    return make_polygon(
        parse_coords(std::string_view(s).substr(open + 2, close - open - 2)));
  }
  return fail();
}

std::string format_number(double d) {
  if (d == 0.0) return "0";
  if (!std::isfinite(d)) return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
  std::array<char, 64> buf{};
  const auto fmt = std::fabs(d) < 1e15 && std::fabs(d) >= 1e-6
                       ? std::chars_format::fixed
                       : std::chars_format::general;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, fmt);
  return std::string(buf.data(), ptr);
}

std::string normalize_value(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const {
      return to_lower(trim_view(s));
    }
    std::string operator()(Timestamp ts) const {
      return format_timestamp_iso(ts);
    }
    std::string operator()(const GeometryPtr& g) const {
      return g ? to_wkt(*g) : "null";
    }
  };
  return std::visit(Visitor{}, v);
}

std::string display_value(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(Timestamp ts) const {
      return format_timestamp_sql(ts);
    }
    std::string operator()(const GeometryPtr& g) const {
      return g ? to_wkt(*g) : "";
    }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace vtsql
