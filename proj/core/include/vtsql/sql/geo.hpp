#pragma once

#include <string>
#include <string_view>

#include "vtsql/model/value.hpp"

namespace vtsql::sql {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kMetersPerNauticalMile = 1852.0;

// Planar ray casting in the (lon, lat) plane. Points on an edge or vertex
// count as contained. Throws NOT_A_POLYGON for point geometries.
bool st_contains(const Geometry& polygon, LatLon p);

// Great-circle (haversine) distance in nautical miles.
double st_distance(LatLon a, LatLon b);

// Initial great-circle bearing from a to b, degrees in [0, 360).
double initial_bearing(LatLon a, LatLon b);

// Point reached from `from` after travelling `distance_nm` on `bearing_deg`.
LatLon destination_point(LatLon from, double bearing_deg, double distance_nm);

// American Soundex, 4 characters (letter + 3 digits). Non-letters are
// ignored; an input without letters yields "".
std::string soundex(std::string_view text);

// Both inputs have letters and equal Soundex codes.
bool sounds_like(std::string_view name, std::string_view probe);

}  // namespace vtsql::sql
