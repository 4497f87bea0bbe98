#include "vtsql/sql/geo.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "vtsql/error.hpp"

namespace vtsql::sql {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kBoundaryEps = 1e-12;

bool on_edge(LatLon p, LatLon a, LatLon b) {
  const double cross =
      (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  const double scale = std::max({std::fabs(b.lon - a.lon), std::fabs(b.lat - a.lat), 1.0});
  if (std::fabs(cross) > kBoundaryEps * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) - kBoundaryEps &&
         p.lon <= std::max(a.lon, b.lon) + kBoundaryEps &&
         p.lat >= std::min(a.lat, b.lat) - kBoundaryEps &&
         p.lat <= std::max(a.lat, b.lat) + kBoundaryEps;
}

char soundex_digit(char c) {
  switch (c) {
    case 'B': case 'F': case 'P': case 'V': return '1';
    case 'C': case 'G': case 'J': case 'K': case 'Q': case 'S': case 'X': case 'Z':
      return '2';
    case 'D': case 'T': return '3';
    case 'L': return '4';
    case 'M': case 'N': return '5';
    case 'R': return '6';
    default: return '0';  // vowels, H, W, Y
  }
}

}  // namespace

bool st_contains(const Geometry& polygon, LatLon p) {
  if (polygon.kind != ShapeKind::Polygon) {
    throw Error(Errc::NotAPolygon, "ST_CONTAINS requires a polygon");
  }
  const auto& v = polygon.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (on_edge(p, v[j], v[i])) return true;
    // Half-open rule on lat so vertices shared by two edges count once.
    if ((v[i].lat > p.lat) != (v[j].lat > p.lat)) {
      const double x = v[j].lon + (p.lat - v[j].lat) * (v[i].lon - v[j].lon) /
                                      (v[i].lat - v[j].lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

double st_distance(LatLon a, LatLon b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) *
                       std::sin(dlambda / 2);
  const double c = 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
  return kEarthRadiusKm * 1000.0 * c / kMetersPerNauticalMile;
}

double initial_bearing(LatLon a, LatLon b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg + 360.0, 360.0);
  return deg >= 360.0 ? 0.0 : deg;
}

LatLon destination_point(LatLon from, double bearing_deg, double distance_nm) {
  const double delta =
      distance_nm * kMetersPerNauticalMile / (kEarthRadiusKm * 1000.0);
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = from.lat * kDegToRad;
  const double lambda1 = from.lon * kDegToRad;
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) +
                                std::cos(phi1) * std::sin(delta) * std::cos(theta));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  double lon = lambda2 / kDegToRad;
  lon = std::fmod(lon + 540.0, 360.0) - 180.0;
  return LatLon{phi2 / kDegToRad, lon};
}

std::string soundex(std::string_view text) {
  std::string code;
  char last = 0;
  for (unsigned char raw : text) {
    if (!std::isalpha(raw)) continue;
    const char c = static_cast<char>(std::toupper(raw));
    const char digit = soundex_digit(c);
    if (code.empty()) {
      code.push_back(c);
      last = digit;
      continue;
    }
    if (c == 'H' || c == 'W') continue;  // do not separate equal codes
    if (digit == '0') {
      last = '0';
      continue;
    }
    if (digit != last) {
      code.push_back(digit);
      if (code.size() == 4) break;
    }
    last = digit;
  }
  if (!code.empty()) code.resize(4, '0');
  return code;
}

bool sounds_like(std::string_view name, std::string_view probe) {
  const std::string a = soundex(name);
  return !a.empty() && a == soundex(probe);
}

}  // namespace vtsql::sql
