#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "vtsql/knowledge/corpus.hpp"
#include "vtsql/knowledge/rules.hpp"
#include "vtsql/ner/ner.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/geo.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/trafficgen/trafficgen.hpp"

using namespace vtsql;

namespace {

std::string data(const std::string& rel) { return std::string(VTSQL_BENCH_DATA_DIR) + "/" + rel; }

const trafficgen::ScenarioSpec& spec() {
  static const auto s = trafficgen::load_scenario(data("default_scenario.json"));
  return s;
}

trafficgen::ScenarioSpec scaled(int vessels) {
  auto s = spec();
  s.vessel_count = vessels;
  return s;
}

sql::SnapshotPtr snapshot_for(int vessels) {
  static std::map<int, sql::SnapshotPtr> cache;
  auto& slot = cache[vessels];
  if (!slot) {
    sql::TableStore store;
    trafficgen::generate(scaled(vessels), knowledge::load_rules(spec().rules_file)).load_into(store);
    slot = store.snapshot();
  }
  return slot;
}

void BM_ExecuteZoneFilter(benchmark::State& state) {
  const auto snap = snapshot_for(static_cast<int>(state.range(0)));
  const std::string q =
      "SELECT mmsi, ship_name FROM ship_ais WHERE sog > 8 AND "
      "ST_CONTAINS((SELECT geometry FROM shp_data WHERE name = 'fairway'), POINT(lat, lon))";
  const sql::ExecOptions opts{spec().now(), std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(sql::execute_sql(q, *snap, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExecuteZoneFilter)->Arg(20)->Arg(200)->Arg(500);

void BM_ExecuteJoin(benchmark::State& state) {
  const auto snap = snapshot_for(static_cast<int>(state.range(0)));
  const std::string q =
      "SELECT name_a, cpa_nm, sog FROM warn_single JOIN ship_ais ON mmsi_a = mmsi WHERE warn_level >= 2";
  const sql::ExecOptions opts{spec().now(), std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(sql::execute_sql(q, *snap, opts));
}
BENCHMARK(BM_ExecuteJoin)->Arg(20)->Arg(200);

void BM_PrepareSql(benchmark::State& state) {
  const std::string q =
      "SELECT mmsi, ship_name FROM ship_ais WHERE (ship_type = 'VLCC' OR draft >= 15) AND "
      "ST_CONTAINS((SELECT geometry FROM shp_data WHERE name = 'strait'), POINT(lat, lon)) ORDER BY sog DESC LIMIT 5";
  for (auto _ : state) benchmark::DoNotOptimize(sql::prepare(q));
}
BENCHMARK(BM_PrepareSql);

void BM_SairCompile(benchmark::State& state) {
  const std::string text =
      "(project (mmsi ship_name draft ship_type) (select (and (or (= ship_type 'VLCC') (>= draft 15)) "
      "(st_contains (shape 'strait') (lat lon))) (rel ship_ais)))";
  for (auto _ : state) benchmark::DoNotOptimize(sair::compile(sair::parse_sair(text)));
}
BENCHMARK(BM_SairCompile);

void BM_StContains(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<LatLon> ring;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * 3.141592653589793 * i / n;
    const double r = i % 2 ? 0.3 : 0.5;
    ring.push_back({r * std::sin(a), r * std::cos(a)});
  }
  const auto poly = make_polygon(ring);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::vector<LatLon> pts(1024);
  for (auto& p : pts) p = {u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sql::st_contains(poly, pts[i++ & 1023]));
}
BENCHMARK(BM_StContains)->Arg(4)->Arg(32)->Arg(256);

void BM_Bm25Retrieve(benchmark::State& state) {
  static const auto corpus = knowledge::Corpus::load_dir(data("corpus"));
  const knowledge::Bm25Index index(corpus);
  for (auto _ : state) benchmark::DoNotOptimize(index.retrieve("speed limit in the fairway for tankers", 3));
}
BENCHMARK(BM_Bm25Retrieve);

void BM_Annotate(benchmark::State& state) {
  const auto lexicon = ner::load_lexicon(data("type_lexicon.tsv"));
  const auto gaz = ner::Gazetteer::build(*snapshot_for(static_cast<int>(state.range(0))), lexicon);
  const std::string text = "List draft and type information of VLCC and deep-draught vessel in the strait near ALIBAMA";
  for (auto _ : state) benchmark::DoNotOptimize(ner::annotate(text, gaz));
}
BENCHMARK(BM_Annotate)->Arg(20)->Arg(500);

void BM_Generate(benchmark::State& state) {
  const auto s = scaled(static_cast<int>(state.range(0)));
  const auto rules = knowledge::load_rules(spec().rules_file);
  for (auto _ : state) benchmark::DoNotOptimize(trafficgen::generate(s, rules));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
