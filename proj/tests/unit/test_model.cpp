#include <doctest.h>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/model/records.hpp"
#include "vtsql/model/result_set.hpp"
#include "vtsql/model/schema.hpp"
#include "vtsql/util/csv.hpp"
#include "vtsql/util/text.hpp"

using namespace vtsql;

TEST_CASE("schema has the four tables with fixed column counts") {
  const auto& s = SchemaRegistry::vessel_traffic();
  REQUIRE(s.tables().size() == 4);
  CHECK(s.at("ship_ais").columns.size() == 17);
  CHECK(s.at("ship_ais_quarter").columns.size() == 17);
  CHECK(s.at("shp_data").columns.size() == 6);
  CHECK(s.at("warn_single").columns.size() == 11);
  for (const auto& t : s.tables()) {
    std::set<std::string> names;
    for (const auto& c : t.columns) CHECK(names.insert(c.name).second);
    for (const auto& k : t.key_columns) CHECK(t.column_index(k).has_value());
  }
  CHECK_THROWS_AS(s.at("nope"), Error);
  CHECK(s.find("nope") == nullptr);
}

TEST_CASE("schema suggestions") {
  const auto& s = SchemaRegistry::vessel_traffic();
  const std::vector<const TableDef*> ais{s.find("ship_ais")};
  CHECK(s.suggest_column("speed", ais) == "sog");
  CHECK(s.suggest_column("draught", ais) == "draft");
  CHECK(s.suggest_column("shipname", ais) == "ship_name");
  CHECK(s.suggest_column("zzzzzzzzzz", ais).empty());
  CHECK(s.suggest_table("ship_ai") == "ship_ais");
}

TEST_CASE("schema json lists kinds") {
  const auto j = SchemaRegistry::vessel_traffic().to_json();
  REQUIRE(j["tables"].size() == 4);
  CHECK(j["tables"][0]["name"] == "ship_ais");
  CHECK(j["tables"][0]["columns"][0]["name"] == "mmsi");
  CHECK(j["tables"][0]["columns"][0]["kind"] == "integer");
}

TEST_CASE("normalize_value") {
  CHECK(normalize_value(Value{std::string(" ALABAMA ")}) == "alabama");
  CHECK(normalize_value(Value{12.50}) == "12.5");
  CHECK(normalize_value(Value{std::int64_t{12}}) == normalize_value(Value{12.0}));
  CHECK(normalize_value(Value{make_timestamp(2024, 1, 2, 3, 4, 5)}) == "2024-01-02T03:04:05Z");
  CHECK(normalize_value(Value{}) == "null");
  CHECK(normalize_value(Value{0.1 + 0.2}) == "0.30000000000000004");
}

TEST_CASE("timestamps parse both separators and reject junk") {
  const auto a = parse_timestamp("2024-05-01 06:00:00");
  const auto b = parse_timestamp("2024-05-01T06:00:00Z");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(*a == *b);
  CHECK(format_timestamp_sql(*a) == "2024-05-01 06:00:00");
  CHECK_FALSE(parse_timestamp("2024-13-01 00:00:00"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK(a->plus_minutes(30).seconds - a->seconds == 1800);
}

TEST_CASE("canonical_row sorts by column name and normalizes") {
  const std::vector<std::string> cols{"name", "mmsi"};
  const Row row{std::string("Alpha"), std::int64_t{123}};
  CHECK(canonical_row(cols, row) == CanonicalRow{"123", "alpha"});
  CHECK(canonical_row(std::vector<std::string>{"mmsi"}, Row{std::int64_t{7}}) == CanonicalRow{"7"});
  CHECK_THROWS_AS(canonical_row(std::vector<std::string>{"a", "b"}, Row{std::string("x")}), Error);
  try {
    canonical_row(std::vector<std::string>{"a", "b"}, Row{std::string("x")});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ArityMismatch);
  }
}

TEST_CASE("canonical_row is idempotent on sorted columns") {
  const std::vector<std::string> cols{"a", "b", "c"};
  const Row row{std::string(" X "), 1.50, std::int64_t{3}};
  const auto once = canonical_row(cols, row);
  Row again;
  for (const auto& c : once) again.push_back(c);
  CHECK(canonical_row(cols, again) == once);
}

TEST_CASE("result set equality ignores column order and duplicates") {
  ResultSet a({"mmsi", "ship_name"});
  CHECK(a.add_row({std::int64_t{1}, std::string("A")}));
  CHECK(a.add_row({std::int64_t{2}, std::string("B")}));
  CHECK_FALSE(a.add_row({std::int64_t{1}, std::string("a ")}));
  ResultSet b({"ship_name", "mmsi"});
  b.add_row({std::string("b"), std::int64_t{2}});
  b.add_row({std::string("a"), std::int64_t{1}});
  b.add_row({std::string("a"), 1.0});
  CHECK(a.size() == 2);
  CHECK(b.size() == 2);
  CHECK(a == b);
  ResultSet c({"mmsi", "name"});
  c.add_row({std::int64_t{1}, std::string("A")});
  c.add_row({std::int64_t{2}, std::string("B")});
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS(a.add_row({std::int64_t{1}}), Error);
}

TEST_CASE("geometry construction and WKT") {
  const auto sq = make_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(sq.kind == ShapeKind::Polygon);
  CHECK(sq.vertices.front() == sq.vertices.back());
  CHECK(sq.vertices.size() == 5);
  CHECK(parse_wkt(to_wkt(sq)) == sq);
  const auto pt = make_point({1.305, 103.82});
  CHECK(to_wkt(pt) == "POINT(103.82 1.305)");
  CHECK(parse_wkt(to_wkt(pt)) == pt);
  CHECK_THROWS_AS(make_polygon({{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(make_polygon({{0, 0}, {1, 1}, {0, 1}, {1, 0}}), Error);  // bow tie
  CHECK_THROWS_AS(parse_wkt("CIRCLE(1 2)"), Error);
  CHECK_THROWS_AS(make_point({91, 0}), Error);
}

TEST_CASE("record invariants") {
  AisRecord r;
  r.mmsi = 563000001;
  r.ship_name = "TEST";
  r.length = 100;
  r.lat = 1.2;
  r.lon = 103.8;
  CHECK_NOTHROW(r.validate());
  CHECK(r.to_row().size() == 17);
  CHECK(AisRecord::from_row(r.to_row()).mmsi == r.mmsi);
  r.lat = 95;
  CHECK_THROWS_AS(r.validate(), Error);
  r.lat = 1.2;
  r.sog = -1;
  CHECK_THROWS_AS(r.validate(), Error);
  r.sog = 0;
  r.cog = 360;
  CHECK_THROWS_AS(r.validate(), Error);

  WarnRecord w;
  w.mmsi_a = 1;
  w.mmsi_b = 1;
  CHECK_THROWS_AS(w.validate(), Error);
  w.mmsi_b = 2;
  CHECK_NOTHROW(w.validate());
  CHECK(w.to_row().size() == 11);

  GeoShape s;
  s.id = 1;
  s.name = "pilot station";
  s.geometry = make_point({1.3, 103.8});
  CHECK(s.to_row().size() == 6);
  const auto j = to_json(s);
  CHECK(j["obj_type"] == "POINT");
  CHECK(j["vertices"].size() == 1);
}

TEST_CASE("csv parsing") {
  const auto recs = parse_csv("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\r\n\n1,\n");
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].fields == std::vector<std::string>{"x, y", "he said \"hi\""});
  CHECK(recs[2].fields == std::vector<std::string>{"1", ""});
  CHECK(recs[2].line == 4);
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
}

TEST_CASE("text helpers") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(iequals("Strait", "STRAIT"));
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(sql_quote("O'Brien") == "'O''Brien'");
  CHECK(join(split("a,b,,c", ','), "|") == "a|b||c");
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}
