#pragma once

// Reference implementations kept deliberately naive and separate from the
// library so tests compare two independent computations.

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vtsql/model/value.hpp"

namespace vtsql::oracle {

// Winding number of the ring around p in the (lon, lat) plane; nonzero
// means inside. Points on an edge count as inside.
inline bool winding_inside(const std::vector<LatLon>& ring, LatLon p) {
  auto cross = [](LatLon a, LatLon b, LatLon c) {
    return (b.lon - a.lon) * (c.lat - a.lat) - (c.lon - a.lon) * (b.lat - a.lat);
  };
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LatLon a = ring[i], b = ring[(i + 1) % n];
    if (a == b) continue;
    const double c = cross(a, b, p);
    const bool within_box = std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
                            std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
    if (c == 0 && within_box) return true;
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && c > 0) ++wn;
    } else if (b.lat <= p.lat && c < 0) {
      --wn;
    }
  }
  return wn != 0;
}

inline double haversine_nm(LatLon a, LatLon b) {
  const double r = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * r, dlon = (b.lon - a.lon) * r;
  const double h = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(a.lat * r) * std::cos(b.lat * r) * std::pow(std::sin(dlon / 2), 2);
  return 2 * 6371008.8 * std::asin(std::sqrt(h)) / 1852.0;
}

// Textbook American Soundex with the h/w rule.
inline std::string soundex(std::string_view s) {
  auto code = [](char c) -> char {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'b': case 'f': case 'p': case 'v': return '1';
      case 'c': case 'g': case 'j': case 'k': case 'q': case 's': case 'x': case 'z': return '2';
      case 'd': case 't': return '3';
      case 'l': return '4';
      case 'm': case 'n': return '5';
      case 'r': return '6';
      case 'h': case 'w': return 'h';
      default: return '0';
    }
  };
  std::string letters;
  for (char c : s)
    if (std::isalpha(static_cast<unsigned char>(c))) letters += c;
  if (letters.empty()) return "";
  std::string out(1, static_cast<char>(std::toupper(static_cast<unsigned char>(letters[0]))));
  char last = code(letters[0]);
  for (std::size_t i = 1; i < letters.size() && out.size() < 4; ++i) {
    const char c = code(letters[i]);
    if (c == 'h') continue;
    if (c != '0' && c != last) out += c;
    last = c;
  }
  out.resize(4, '0');
  return out;
}

}  // namespace vtsql::oracle
