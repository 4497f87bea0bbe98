#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "support/fixtures.hpp"
#include "vtsql/error.hpp"
#include "vtsql/eval/eval.hpp"

using namespace vtsql;
using namespace vtsql::eval;

namespace {

ResultSet rows(std::initializer_list<int> ids) {
  ResultSet r({"mmsi"});
  for (int i : ids) r.add_row({std::int64_t{i}});
  return r;
}

nlohmann::json fixture_script() { return nlohmann::json::parse(read_file(test::data_path("scripts/fixture.json"))); }

ScoreReport bench(llm::ScriptedBackend& be, const BenchmarkOptions& opts) {
  auto ws = test::default_workspace();
  return run_benchmark(load_testset(test::data_path("testsets/fixture10.jsonl")), opts, ws->resources(&be));
}

}  // namespace

TEST_CASE("base score") {
  CHECK(base_score(rows({1, 2, 3}), rows({1, 2, 3})) == 1.0);
  CHECK(base_score(rows({1, 2, 3, 4}), rows({1, 2})) == 0.5);
  CHECK(base_score(rows({1, 2, 3}), rows({})) == 0.0);
}

TEST_CASE("penalty factor") {
  CHECK(penalty_factor(4, 6) == doctest::Approx(2.0 / 3.0));
  CHECK(penalty_factor(1, 100) == doctest::Approx(0.01));
  try {
    penalty_factor(3, 3);
    FAIL("expected guard violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GuardViolation);
  }
  CHECK_THROWS_AS(penalty_factor(0, 3), Error);
  CHECK_THROWS_AS(penalty_factor(5, 3), Error);
}

TEST_CASE("match score examples") {
  CHECK(match_score(rows({1, 2, 3}), rows({3, 2, 1})) == 100.0);
  CHECK(match_score(rows({1, 2, 3, 4}), rows({1, 2, 3, 4, 5, 6})) == doctest::Approx(66.67).epsilon(1e-4));
  CHECK(match_score(rows({1, 2, 3, 4}), rows({1, 2})) == doctest::Approx(50.0));
  CHECK(match_score(rows({1, 2}), std::nullopt) == 0.0);
  CHECK(match_score(rows({}), rows({})) == 100.0);
  CHECK(match_score(rows({}), rows({1})) == 0.0);
  CHECK(match_score(rows({1}), rows({})) == 0.0);
}

TEST_CASE("identity, range and monotonicity on random sets") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> size(0, 12), val(0, 20);
  for (int n = 0; n < 500; ++n) {
    std::set<int> g, p;
    for (int i = size(rng); i > 0; --i) g.insert(val(rng));
    for (int i = size(rng); i > 0; --i) p.insert(val(rng));
    ResultSet gr({"mmsi"}), pr({"mmsi"});
    for (int v : g) gr.add_row({std::int64_t{v}});
    for (int v : p) pr.add_row({std::int64_t{v}});
    std::size_t inter = 0;
    for (int v : g) inter += p.count(v);
    const double m = match_score(gr, pr);
    CHECK(m >= 0.0);
    CHECK(m <= 100.0);
    if (!g.empty()) {
      CHECK(std::abs(m - 100.0 * inter / std::max(g.size(), p.size())) < 1e-9);
      CHECK((m == 100.0) == (g == p));
    }
    // adding a correct missing row never hurts; adding a spurious row never helps
    for (int v : g) {
      if (p.count(v)) continue;
      ResultSet more = pr;
      more.add_row({std::int64_t{v}});
      CHECK(match_score(gr, more) >= m);
      break;
    }
    ResultSet spurious = pr;
    spurious.add_row({std::int64_t{1000 + n}});
    if (!g.empty()) CHECK(match_score(gr, spurious) <= m);
  }
}

TEST_CASE("testset parsing") {
  const auto items = parse_testset(
      "# comment\n\n{\"id\": \"a\", \"style\": \"command\", \"question\": \"q\", \"gold_sql\": \"SELECT 1\"}\n");
  REQUIRE(items.size() == 1);
  CHECK(items[0].style == Style::Command);
  CHECK_THROWS_AS(parse_testset("{\"id\": \"a\", \"style\": \"FORMAL\", \"question\": \"q\", \"gold_sql\": \"x\"}\n"
                                "{\"id\": \"a\", \"style\": \"FORMAL\", \"question\": \"q\", \"gold_sql\": \"x\"}\n"),
                  Error);
  CHECK_THROWS_AS(parse_testset("{\"id\": \"a\", \"style\": \"POETIC\", \"question\": \"q\", \"gold_sql\": \"x\"}"), Error);
  CHECK_THROWS(parse_testset("not json"));
  CHECK(load_testset(test::data_path("testsets/fixture10.jsonl")).size() == 10);
  CHECK(load_testset(test::data_path("testsets/gold_suite.jsonl")).size() >= 20);
}

TEST_CASE("fixture benchmark scores 100 for every representation") {
  auto be = llm::ScriptedBackend::from_json(fixture_script());
  BenchmarkOptions opts;
  opts.representations = llm::all_representations();
  const auto report = bench(be, opts);
  CHECK(report.items.size() == 50);
  CHECK(report.overall == 100.0);
  for (const auto& [r, v] : report.per_representation) CHECK(v == 100.0);
  CHECK(report.per_style.size() == 3);
  const auto table = report.to_table();
  CHECK(table.find("BASIC") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);
}

TEST_CASE("one over-selecting item scores 66.67 and the mean 96.67") {
  auto j = fixture_script();
  for (auto& s : j["scripts"]) {
    if (s["target"] == "SAIR" && s["question"].get<std::string>().find("speed requirements") != std::string::npos) {
      s["replies"] = {"(project (mmsi ship_name) (select (and (st_contains (shape 'fairway') (lat lon)) (> sog 11)) "
                      "(rel ship_ais)))"};
    }
  }
  auto be = llm::ScriptedBackend::from_json(j);
  const auto report = bench(be, {});
  REQUIRE(report.items.size() == 10);
  const auto it = std::find_if(report.items.begin(), report.items.end(), [](const auto& i) { return i.id == "f04"; });
  REQUIRE(it != report.items.end());
  CHECK(it->gold_rows == 4);
  CHECK(it->pred_rows == 6);
  CHECK(it->score == doctest::Approx(66.67).epsilon(1e-4));
  CHECK(report.overall == doctest::Approx(96.67).epsilon(1e-4));
}

TEST_CASE("style filter and failure logging") {
  auto be = llm::ScriptedBackend::from_json(fixture_script());
  BenchmarkOptions opts;
  opts.style = Style::Command;
  const auto report = bench(be, opts);
  CHECK_FALSE(report.items.empty());
  for (const auto& i : report.items) CHECK(i.style == Style::Command);
  CHECK(report.per_style.size() == 1);

  llm::ScriptedBackend empty;
  const auto failed = bench(empty, {});
  CHECK(failed.overall == 0.0);
  for (const auto& i : failed.items) {
    CHECK(i.failed);
    CHECK(i.failure.find("SCRIPT_MISS") != std::string::npos);
  }
}

TEST_CASE("report determinism and thread independence") {
  auto a = llm::ScriptedBackend::from_json(fixture_script());
  auto b = llm::ScriptedBackend::from_json(fixture_script());
  BenchmarkOptions opts;
  opts.representations = llm::all_representations();
  const auto serial = bench(a, opts);
  opts.threads = 4;
  const auto parallel = bench(b, opts);
  CHECK(serial.to_json(false) == parallel.to_json(false));
  CHECK(serial.to_json(true).contains("timings"));
  CHECK_FALSE(serial.to_json(false).contains("timings"));
}

TEST_CASE("aggregate is the arithmetic mean") {
  ScoreReport r;
  for (int i = 0; i < 4; ++i) {
    ItemScore s;
    s.id = std::to_string(i);
    s.style = i % 2 ? Style::Formal : Style::Operational;
    s.score = 25.0 * i;
    r.items.push_back(s);
  }
  r.aggregate();
  CHECK(r.overall == doctest::Approx(37.5));
  CHECK(r.per_style[Style::Formal] == doctest::Approx(50.0));
  CHECK(r.per_style[Style::Operational] == doctest::Approx(25.0));
}
