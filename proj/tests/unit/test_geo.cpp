#include <doctest.h>

#include <cmath>
#include <random>

#include "vtsql/error.hpp"
#include "vtsql/sql/geo.hpp"

using namespace vtsql;
using namespace vtsql::sql;

TEST_CASE("unit square containment") {
  const auto sq = make_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(st_contains(sq, {0.5, 0.5}));
  CHECK(st_contains(sq, {0.0, 0.5}));  // edge
  CHECK(st_contains(sq, {1.0, 1.0}));  // vertex
  CHECK_FALSE(st_contains(sq, {1.5, 0.5}));
  CHECK_FALSE(st_contains(sq, {-0.0001, 0.5}));
  CHECK_THROWS_AS(st_contains(make_point({0, 0}), {0, 0}), Error);
}

TEST_CASE("concave polygon") {
  // U shape opening north
  const auto u = make_polygon({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {3, 2}, {3, 3}, {0, 3}});
  CHECK(st_contains(u, {0.5, 1.5}));
  CHECK_FALSE(st_contains(u, {2, 1.5}));
  CHECK(st_contains(u, {2, 0.5}));
}

TEST_CASE("haversine distance") {
  CHECK(st_distance({0, 0}, {1, 0}) == doctest::Approx(60.04).epsilon(0.05 / 60.04));
  CHECK(st_distance({0, 0}, {0, 0}) == 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180);
  for (int i = 0; i < 200; ++i) {
    const LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    CHECK(st_distance(a, b) == st_distance(b, a));
  }
}

TEST_CASE("bearing and destination agree") {
  const LatLon a{1.2, 103.8};
  for (double brg : {0.0, 45.0, 90.0, 200.0}) {
    const auto b = destination_point(a, brg, 5.0);
    CHECK(st_distance(a, b) == doctest::Approx(5.0).epsilon(1e-6));
    const double got = initial_bearing(a, b);
    CHECK(got >= 0.0);
    CHECK(got < 360.0);
    CHECK(std::remainder(got - brg, 360.0) == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("soundex") {
  CHECK(soundex("ALABAMA") == "A415");
  CHECK(soundex("alibama") == "A415");
  CHECK(soundex("Robert") == "R163");
  CHECK(soundex("Rupert") == "R163");
  CHECK(soundex("Ashcraft") == "A261");
  CHECK(soundex("Tymczak") == "T522");
  CHECK(soundex("Pfister") == "P236");
  CHECK(soundex("Lee") == "L000");
  CHECK(soundex("123").empty());
  CHECK(sounds_like("ALIBAMA", "ALABAMA"));
  CHECK_FALSE(sounds_like("WEST COAST", "ALABAMA"));
  CHECK_FALSE(sounds_like("", ""));
}
