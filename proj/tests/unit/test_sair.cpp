#include <doctest.h>

#include <set>

#include "support/golden.hpp"
#include "vtsql/error.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/parser.hpp"

using namespace vtsql;

namespace {

const char* kVlcc =
    "(project (mmsi ship_name) (select (and (= ship_type 'VLCC') (st_contains (shape 'strait') (lat lon))) "
    "(rel ship_ais)))";

Error error_of(std::string_view text) {
  try {
    sair::parse_sair(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("parse succeeded: " << text);
  return Error(Errc::Io, "");
}

}  // namespace

TEST_CASE("parse the strait example") {
  const auto e = sair::parse_sair(kVlcc);
  CHECK(e.kind == sair::NodeKind::Project);
  REQUIRE(e.children.size() == 1);
  CHECK(e.children[0].kind == sair::NodeKind::Select);
  CHECK(e.columns.size() == 2);
  CHECK(sair::compile(e) ==
        "SELECT mmsi, ship_name FROM ship_ais WHERE ship_type = 'VLCC' AND "
        "ST_CONTAINS((SELECT geometry FROM shp_data WHERE name = 'strait'), POINT(lat, lon))");
}

TEST_CASE("minimal tree compiles without WHERE") {
  CHECK(sair::compile(sair::parse_sair("(project (mmsi ship_name) (rel ship_ais))")) ==
        "SELECT mmsi, ship_name FROM ship_ais");
}

TEST_CASE("syntax errors") {
  CHECK(error_of("(rel ship_ais)").code() == Errc::SairSyntaxError);
  CHECK(error_of("(project (mmsi) (select (> sog 12) (rel ship_ais))").code() == Errc::SairSyntaxError);
  CHECK(error_of("").code() == Errc::SairSyntaxError);
  CHECK(error_of("(project (mmsi) (rel ship_ais)) extra").code() == Errc::SairSyntaxError);
  CHECK(error_of("(project (mmsi) (select (frobnicate sog) (rel ship_ais)))").code() == Errc::SairSyntaxError);
  CHECK(error_of("(project (mmsi) (select (> sog (minutes 3)) (rel ship_ais)))").code() == Errc::SairSyntaxError);
  CHECK(error_of("(project (mmsi) (select (= ship_name 'open) (rel ship_ais)))").code() == Errc::SairSyntaxError);
  const auto e = error_of("(project (mmsi) (select (> sog 12) (rel ship_ais))");
  CHECK(e.position() != Error::npos);
}

TEST_CASE("schema errors suggest a column") {
  const auto e = error_of("(project (mmsi speed) (rel ship_ais))");
  CHECK(e.code() == Errc::SairSchemaError);
  CHECK(e.token() == "speed");
  CHECK(e.suggestion() == "sog");
  CHECK(error_of("(project (mmsi) (rel vessels))").code() == Errc::SairSchemaError);
  CHECK(error_of("(project (mmsi) (select (st_contains (shape 'strait') (lat lon)) (rel shp_data)))").code() ==
        Errc::SairSchemaError);
}

TEST_CASE("explain lists nodes in pre-order") {
  const auto lines = sair::explain(sair::parse_sair(kVlcc));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].find("PROJECT") != std::string::npos);
  CHECK(lines[1].find("strait") != std::string::npos);
  CHECK(lines[2].find("ship_ais") != std::string::npos);
  CHECK(lines[0].find_first_not_of(' ') < lines[2].find_first_not_of(' '));
  CHECK(sair::explain(sair::parse_sair("(project (mmsi) (rel ship_ais))")).size() == 2);
}

TEST_CASE("golden pairs: print round trip, stable SQL, execution equality") {
  const auto snap = test::default_snapshot();
  const sql::ExecOptions opts{test::default_spec().now(), std::nullopt};
  std::set<std::string> compiled;
  for (const auto& p : test::sair_pairs()) {
    CAPTURE(p.id);
    const auto ir = sair::parse_sair(p.sair);
    CHECK(sair::parse_sair(sair::print(ir)) == ir);
    CHECK(sair::print(sair::parse_sair(sair::print(ir))) == sair::print(ir));
    const auto sql = sair::compile(ir);
    CHECK(test::golden_matches("sair/" + p.id + ".sql", sql + "\n"));
    CHECK_NOTHROW(sql::prepare(sql));
    CHECK(sql::execute_sql(sql, *snap, opts) == sql::execute_sql(p.gold_sql, *snap, opts));
    CHECK(compiled.insert(sql).second);
  }
  CHECK(compiled.size() >= 10);
}

TEST_CASE("join qualifies shared column names") {
  const auto sql = sair::compile(sair::parse_sair(
      "(project (ship_name cpa_nm) (join (= mmsi_a mmsi) (rel warn_single) (rel ship_ais)))"));
  CHECK(sql.find(" JOIN ") != std::string::npos);
  CHECK(sql.find(" JOIN ", sql.find(" JOIN ") + 1) == std::string::npos);
  CHECK_NOTHROW(sql::prepare(sql));
  // lat exists in both tables
  CHECK(error_of("(project (name_a lat) (join (= mmsi_a mmsi) (rel warn_single) (rel ship_ais)))").code() ==
        Errc::SairSchemaError);
  CHECK_NOTHROW(sql::prepare(sair::compile(sair::parse_sair(
      "(project (name_a ship_ais.lat) (join (= mmsi_a mmsi) (rel warn_single) (rel ship_ais)))"))));
}

TEST_CASE("structural equality ignores positions") {
  const auto a = sair::parse_sair("(project (mmsi) (select (> sog 12) (rel ship_ais)))");
  const auto b = sair::parse_sair("(project   (mmsi)\n (select (>   sog 12)  (rel  ship_ais)))");
  CHECK(a == b);
  const auto c = sair::parse_sair("(project (mmsi) (select (> sog 13) (rel ship_ais)))");
  CHECK_FALSE(a == c);
}

TEST_CASE("compile_predicate") {
  const auto e = sair::parse_sair("(project (mmsi) (select (and (> sog 12) (= ship_type 'VLCC')) (rel ship_ais)))");
  CHECK(sair::compile_predicate(*e.children[0].pred) == "sog > 12 AND ship_type = 'VLCC'");
}
