#include <doctest.h>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "vtsql/ner/ner.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/parser.hpp"

using namespace vtsql;
using namespace vtsql::ner;

namespace {

const std::vector<LexiconEntry>& lexicon() {
  static const auto lex = load_lexicon(test::data_path("type_lexicon.tsv"));
  return lex;
}

const Gazetteer& gazetteer() {
  static const auto g = Gazetteer::build(*test::default_snapshot(), lexicon());
  return g;
}

std::vector<std::string> tags(const std::vector<EntityAnnotation>& anns) {
  std::vector<std::string> out;
  for (const auto& a : anns) out.push_back(a.tag_path + "@" + a.surface);
  return out;
}

void check_well_formed(const std::vector<EntityAnnotation>& anns) {
  for (std::size_t i = 0; i < anns.size(); ++i) {
    CHECK(anns[i].start < anns[i].end);
    if (i) CHECK(anns[i - 1].end <= anns[i].start);
    const auto slash = anns[i].tag_path.find('/');
    CHECK(anns[i].tag_path.find('/', slash == std::string::npos ? 0 : slash + 1) == std::string::npos);
  }
}

}  // namespace

TEST_CASE("lexicon parsing") {
  const auto lex = parse_lexicon("# comment\nvlcc\tVESSEL_TYPE/VLCC\tVLCC\n\nstrait\tREGION/STRAIT\n");
  REQUIRE(lex.size() == 2);
  CHECK(lex[0].canonical == "VLCC");
  CHECK(lex[1].tag_path == "REGION/STRAIT");
  CHECK(lex[1].canonical == "strait");
  CHECK_THROWS(parse_lexicon("only-one-field\n"));
  CHECK(lexicon().size() > 20);
}

TEST_CASE("normalize_surface") {
  CHECK(normalize_surface("  The  STRAIT, please ") == "the strait please");
  CHECK(normalize_surface("deep-draught") == "deep-draught");
  CHECK(normalize_surface("") == "");
}

TEST_CASE("VLCCs and DDVs in the Strait") {
  const std::string q = "List MMSI and name of VLCCs and DDVs in the Strait.";
  const auto anns = annotate(q, gazetteer());
  CHECK(tags(anns) == std::vector<std::string>{"VESSEL_TYPE/VLCC@VLCCs", "VESSEL_TYPE/DDV@DDVs", "REGION/STRAIT@Strait"});
  check_well_formed(anns);
  for (const auto& a : anns) CHECK(q.substr(a.start, a.end - a.start) == a.surface);
  REQUIRE(anns[2].resolution);
  CHECK(anns[2].resolution->table == "shp_data");
  CHECK(anns[2].confidence == Confidence::Exact);
  CHECK(verification_queries(anns).empty());
}

TEST_CASE("empty input") {
  CHECK(annotate("", gazetteer()).empty());
  CHECK(annotate("   ", gazetteer()).empty());
  CHECK(facts_prompt({}, {}).empty());
}

TEST_CASE("West Coast resolves to the vessel, or is ambiguous with a zone") {
  const auto anns = annotate("where is West Coast?", gazetteer());
  REQUIRE(anns.size() == 1);
  CHECK(anns[0].tag_path == "VESSEL_NAME");
  CHECK(anns[0].surface == "West Coast");
  REQUIRE(anns[0].resolution);
  CHECK(anns[0].resolution->table == "ship_ais");

  auto g = gazetteer();
  g.add("west coast", Candidate{"REGION/COAST", EntityRef{"shp_data", "99", "west coast"}, "west coast"});
  const auto amb = annotate("where is West Coast?", g);
  REQUIRE(amb.size() == 1);
  CHECK(amb[0].ambiguous());
  const auto probes = verification_queries(amb);
  REQUIRE(probes.size() == 2);
  CHECK(probes[0].table != probes[1].table);
}

TEST_CASE("fuzzy vessel names produce a sounds-like probe") {
  const auto anns = annotate("What is the current speed and location of vessel sounds like ALIBAMA?", gazetteer());
  const auto it = std::find_if(anns.begin(), anns.end(), [](const auto& a) { return a.tag_path == "VESSEL_NAME"; });
  REQUIRE(it != anns.end());
  CHECK(it->confidence == Confidence::Fuzzy);
  CHECK(it->canonical == "ALABAMA");
  const auto probes = verification_queries(anns);
  REQUIRE(probes.size() == 1);
  CHECK(probes[0].table == "ship_ais");
  CHECK(probes[0].sql.find("SOUNDS_LIKE(ship_name, 'ALIBAMA')") != std::string::npos);
  const auto rows = sql::execute_sql(probes[0].sql, *test::default_snapshot(), {test::default_spec().now(), 10});
  CHECK(rows.size() == 1);
}

TEST_CASE("lexicon-only gazetteer leaves regions unresolved and probes shp_data") {
  const auto g = Gazetteer::from_lexicon(lexicon());
  const auto anns = annotate("ships in the Strait", g);
  REQUIRE(anns.size() == 1);
  CHECK(anns[0].tag_path == "REGION/STRAIT");
  CHECK_FALSE(anns[0].resolution);
  const auto probes = verification_queries(anns);
  REQUIRE(probes.size() == 1);
  CHECK(probes[0].table == "shp_data");
  const auto rows = sql::execute_sql(probes[0].sql, *test::default_snapshot(), {test::default_spec().now(), 10});
  CHECK(rows.size() == 1);
  ProbeOutcome out{probes[0], rows, {}};
  const auto facts = facts_prompt(anns, {out});
  CHECK(facts.find("strait") != std::string::npos);
  CHECK(facts.find("not found in database") == std::string::npos);
}

TEST_CASE("temporal windows") {
  auto minutes = [](std::string_view q) -> std::optional<int> {
    for (const auto& a : annotate(q, gazetteer()))
      if (a.tag_path == "TEMPORAL/WINDOW") return a.minutes;
    return std::nullopt;
  };
  CHECK(minutes("ships arriving in the next 30 minutes") == 30);
  CHECK(minutes("ships in the waterway that may enter the port in the next an hour") == 60);
  CHECK(minutes("arrivals within 2 hours") == 120);
  CHECK_FALSE(minutes("ships in the strait"));
}

TEST_CASE("unknown names are unresolved and reported as not found") {
  const auto anns = annotate("where is Zanzibar Express?", gazetteer());
  REQUIRE(anns.size() == 1);
  CHECK(anns[0].confidence == Confidence::Unresolved);
  const auto probes = verification_queries(anns);
  CHECK(probes.size() == 2);
  std::vector<ProbeOutcome> outcomes;
  for (const auto& p : probes) {
    outcomes.push_back({p, sql::execute_sql(p.sql, *test::default_snapshot(), {test::default_spec().now(), 10}), {}});
    CHECK(outcomes.back().rows->empty());
  }
  const auto facts = facts_prompt(anns, outcomes);
  CHECK(facts.find("not found in database") != std::string::npos);
  CHECK(std::count(facts.begin(), facts.end(), '\n') == 1);
}

TEST_CASE("longer spans win and plurals fold") {
  const auto anns = annotate("any deep-draught vessels or tankers at the pilot station", gazetteer());
  CHECK(tags(anns) == std::vector<std::string>{"VESSEL_TYPE/DDV@deep-draught vessels", "VESSEL_TYPE/TANKER@tankers",
                                               "FACILITY/PILOT_STATION@pilot station"});
  check_well_formed(anns);
}

TEST_CASE("every probe parses and resolves, annotate is deterministic") {
  const char* queries[] = {
      "What is the current speed and location of vessel sounds like ALABAMA?",
      "show me the ships in the waterway that may enter the port in the next an hour",
      "where is West Coast?",
      "where is Zanzibar Express near the harbour?",
      "Tankers near Gulf Pioneer in channel_1",
      "ships near the pilot boarding ground",
  };
  const auto g = Gazetteer::from_lexicon(lexicon());
  for (const char* q : queries) {
    for (const Gazetteer* gz : {&gazetteer(), &g}) {
      const auto anns = annotate(q, *gz);
      check_well_formed(anns);
      CHECK(tags(anns) == tags(annotate(q, *gz)));
      for (const auto& p : verification_queries(anns)) CHECK_NOTHROW(sql::prepare(p.sql));
    }
  }
}

TEST_CASE("gazetteer cache rebuilds on a new snapshot version") {
  sql::TableStore store;
  GazetteerCache cache(lexicon());
  const auto a = cache.get(*store.snapshot());
  CHECK(cache.get(*store.snapshot()) == a);
  test::default_scenario().load_into(store);
  const auto b = cache.get(*store.snapshot());
  CHECK(b != a);
  CHECK(b->vessels().size() == 20);
  CHECK(b->version() == store.version());
}

TEST_CASE("annotation json") {
  const auto anns = annotate("where is West Coast?", gazetteer());
  const auto j = to_json(anns.at(0));
  CHECK(j["tag_path"] == "VESSEL_NAME");
  CHECK(j["span"] == nlohmann::json::array({9, 19}));
  CHECK(j["confidence"] == "EXACT");
}
