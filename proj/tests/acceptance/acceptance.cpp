// Acceptance gate. One line per criterion; nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"
#include "vtsql/error.hpp"
#include "vtsql/eval/eval.hpp"
#include "vtsql/ner/ner.hpp"
#include "vtsql/pipeline/pipeline.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/executor.hpp"
#include "vtsql/sql/geo.hpp"
#include "vtsql/sql/parser.hpp"

using namespace vtsql;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (problems.size() < 8) problems.push_back(what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ResultSet int_set(const std::set<int>& ids) {
  ResultSet r({"k"});
  for (int v : ids) r.add_row({std::int64_t{v}});
  return r;
}

// ---------------------------------------------------------------- metric

Outcome metric_identity() {
  Outcome o;
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> size(0, 30), val(0, 40);
  double worst = 0;
  const auto t0 = Clock::now();
  for (int n = 0; n < 1000; ++n) {
    std::set<int> g, p;
    const int gs = n == 0 ? 0 : size(rng);  // include an empty gold case
    for (int i = 0; i < gs; ++i) g.insert(val(rng));
    for (int i = size(rng); i > 0; --i) p.insert(val(rng));
    std::size_t inter = 0;
    for (int v : g) inter += p.count(v);
    const double closed = g.empty() ? (p.empty() ? 100.0 : 0.0)
                                    : 100.0 * static_cast<double>(inter) / static_cast<double>(std::max(g.size(), p.size()));
    const double got = eval::match_score(int_set(g), int_set(p));
    worst = std::max(worst, std::abs(got - closed));
  }
  const double secs = seconds_since(t0);
  o.check(worst <= 1e-9, "max deviation " + fmt("%.3g", worst));
  o.check(secs < 1.0, "runtime " + fmt("%.3f", secs) + " s");
  o.detail = "1000 pairs, max |diff| " + fmt("%.1e", worst) + ", " + fmt("%.3f", secs) + " s";
  return o;
}

Outcome metric_examples() {
  Outcome o;
  const auto over = eval::match_score(int_set({1, 2, 3, 4}), int_set({1, 2, 3, 4, 5, 6}));
  const auto under = eval::match_score(int_set({1, 2, 3, 4}), int_set({1, 2}));
  const auto exact = eval::match_score(int_set({1, 2, 3}), int_set({1, 2, 3}));
  const auto failed = eval::match_score(int_set({1, 2, 3}), std::nullopt);
  o.check(std::abs(over - 66.67) <= 0.01, "over-selection " + fmt("%.4f", over));
  o.check(std::abs(under - 50.0) <= 0.01, "under-selection " + fmt("%.4f", under));
  o.check(exact == 100.0, "exact " + fmt("%.4f", exact));
  o.check(failed == 0.0, "failure " + fmt("%.4f", failed));
  o.detail = fmt("%.2f", over) + " / " + fmt("%.2f", under) + " / " + fmt("%.0f", exact) + " / " + fmt("%.0f", failed);
  return o;
}

// ---------------------------------------------------------------- executor

// Hand-written evaluation of every gold query directly over scenario
// records: nested loops, no indexes, independent geometry and soundex.
struct Oracle {
  const trafficgen::Scenario& sc;
  Timestamp now;

  const GeoShape& shape(const std::string& name) const {
    for (const auto& s : sc.shapes)
      if (s.name == name) return s;
    throw std::runtime_error("no shape " + name);
  }
  bool in(const std::string& zone, const AisRecord& r) const {
    return oracle::winding_inside(shape(zone).geometry.vertices, {r.lat, r.lon});
  }
  static Value eta(const AisRecord& r) { return r.eta ? Value{*r.eta} : Value{}; }
  static bool icontains(const std::string& hay, const std::string& needle) {
    return to_lower(hay).find(to_lower(needle)) != std::string::npos;
  }
  const AisRecord* latest(std::int64_t mmsi) const {
    for (const auto& r : sc.latest)
      if (r.mmsi == mmsi) return &r;
    return nullptr;
  }
  bool eta_within(const AisRecord& r, int minutes) const {
    return r.eta && now <= *r.eta && *r.eta <= now.plus_minutes(minutes);
  }

  std::map<std::string, std::function<ResultSet()>> queries() const {
    std::map<std::string, std::function<ResultSet()>> q;
    q["g01"] = [this] {
      ResultSet rs({"ship_name", "sog", "lat", "lon"});
      for (const auto& r : sc.latest)
        if (oracle::soundex(r.ship_name) == oracle::soundex("ALIBAMA")) rs.add_row({r.ship_name, r.sog, r.lat, r.lon});
      return rs;
    };
    q["g02"] = [this] {
      std::vector<AisRecord> fast;
      for (const auto& r : sc.latest)
        if (r.sog > 10) fast.push_back(r);
      std::stable_sort(fast.begin(), fast.end(), [](const auto& a, const auto& b) { return a.sog > b.sog; });
      ResultSet rs({"mmsi", "ship_name", "sog"});
      for (std::size_t i = 0; i < fast.size() && i < 5; ++i) rs.add_row({fast[i].mmsi, fast[i].ship_name, fast[i].sog});
      return rs;
    };
    q["g03"] = [this] {
      ResultSet rs({"ship_name", "lat", "lon"});
      for (const auto& r : sc.latest)
        if (to_upper(r.ship_name) == "WEST COAST") rs.add_row({r.ship_name, r.lat, r.lon});
      return rs;
    };
    q["g04"] = [this] {
      ResultSet rs({"mmsi", "callsign", "imo"});
      for (const auto& r : sc.latest)
        if (icontains(r.ship_name, "polar")) rs.add_row({r.mmsi, r.callsign, r.imo});
      return rs;
    };
    q["g05"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if ((r.ship_type == "VLCC" || r.draft >= 15) && in("strait", r)) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g06"] = [this] {
      ResultSet rs({"mmsi", "ship_name", "draft"});
      for (const auto& r : sc.latest)
        if (r.draft >= 15) rs.add_row({r.mmsi, r.ship_name, r.draft});
      return rs;
    };
    q["g07"] = [this] {
      ResultSet rs({"ship_type"});
      for (const auto& r : sc.latest) rs.add_row({r.ship_type});
      return rs;
    };
    q["g08"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (in("fairway", r) && r.sog > 12) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g09"] = [this] {
      ResultSet rs({"mmsi", "ship_name", "draft"});
      for (const auto& r : sc.latest)
        if (in("channel_1", r) && (r.ship_type == "VLCC" || r.draft >= 15)) rs.add_row({r.mmsi, r.ship_name, r.draft});
      return rs;
    };
    q["g10"] = [this] {
      const auto from = make_timestamp(2024, 5, 1, 2), to = make_timestamp(2024, 5, 1, 4);
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.samples)
        if (in("port", r) && (r.ship_type == "TANKER" || r.ship_type == "VLCC") && from <= r.ts && r.ts <= to)
          rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g11"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (in("fairway", r) && eta_within(r, 60)) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g12"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (eta_within(r, 30)) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g13"] = [this] {
      ResultSet rs({"mmsi", "ts", "lat", "lon"});
      for (const auto& r : sc.samples)
        if (r.mmsi == 636494824 && r.ts >= now.plus_minutes(-60)) rs.add_row({r.mmsi, r.ts, r.lat, r.lon});
      return rs;
    };
    q["g14"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.samples)
        if (in("anchorage", r)) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g15"] = [this] {
      ResultSet rs({"ship_name", "cpa_nm", "tcpa_min"});
      for (const auto& w : sc.warnings)
        for (const auto& a : sc.latest)
          if (a.mmsi == w.mmsi_a && w.warn_level == 3) rs.add_row({a.ship_name, w.cpa_nm, w.tcpa_min});
      return rs;
    };
    q["g16"] = [this] {
      ResultSet rs({"name", "mmsi"});
      for (const auto& a : sc.latest)
        for (const auto& s : sc.shapes)
          if (s.obj_type() == ShapeKind::Polygon && oracle::winding_inside(s.geometry.vertices, {a.lat, a.lon}))
            rs.add_row({s.name, a.mmsi});
      return rs;
    };
    q["g17"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (oracle::haversine_nm({r.lat, r.lon}, {1.305, 103.82}) < 5) rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g18"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (!r.eta && r.ship_type == "TANKER") rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g19"] = [this] {
      ResultSet rs({"mmsi", "ratio"});
      for (const auto& r : sc.latest)
        if (r.length * 0.1 > r.width) rs.add_row({r.mmsi, r.length / r.width});
      return rs;
    };
    q["g20"] = [this] {
      ResultSet rs({"mmsi", "ship_name"});
      for (const auto& r : sc.latest)
        if (to_upper(r.nav_status) == "AT ANCHOR") rs.add_row({r.mmsi, r.ship_name});
      return rs;
    };
    q["g21"] = [this] {
      ResultSet rs({"mmsi"});
      for (const auto& r : sc.latest)
        if (!(r.ship_type == "CARGO" || r.ship_type == "TUG")) rs.add_row({r.mmsi});
      return rs;
    };
    q["g22"] = [this] {
      ResultSet rs({"mmsi_a", "mmsi_b"});
      for (const auto& w : sc.warnings)
        for (const auto& a : sc.latest)
          for (const auto& b : sc.latest)
            if (a.mmsi == w.mmsi_a && b.mmsi == w.mmsi_b && (a.ship_type == "TANKER" || b.ship_type == "TANKER"))
              rs.add_row({w.mmsi_a, w.mmsi_b});
      return rs;
    };
    q["g23"] = [this] {
      double ref = 0;
      for (const auto& r : sc.latest)
        if (to_upper(r.ship_name) == "ALABAMA") ref = r.sog;
      ResultSet rs({"mmsi"});
      for (const auto& r : sc.latest)
        if (r.sog > ref) rs.add_row({r.mmsi});
      return rs;
    };
    q["g24"] = [this] {
      ResultSet rs({"id", "cpa_nm"});
      for (const auto& w : sc.warnings)
        if (w.tcpa_min >= 0 && w.tcpa_min <= 5 && w.cpa_nm < 0.3) rs.add_row({w.id, w.cpa_nm});
      return rs;
    };
    q["g25"] = [this] {
      ResultSet rs({"name_a", "name_b"});
      for (const auto& w : sc.warnings)
        if (w.ts == now) rs.add_row({w.name_a, w.name_b});
      return rs;
    };
    return q;
  }
};

Outcome executor_vs_oracle() {
  Outcome o;
  const auto items = eval::load_testset(test::data_path("testsets/gold_suite.jsonl"));
  const Oracle oracle{test::default_scenario(), test::default_spec().now()};
  const auto queries = oracle.queries();
  const auto snap = test::default_snapshot();
  const sql::ExecOptions opts{test::default_spec().now(), std::nullopt};
  std::size_t checked = 0, empty = 0;
  const auto t0 = Clock::now();
  for (const auto& item : items) {
    const auto it = queries.find(item.id);
    if (it == queries.end()) {
      o.check(false, item.id + " has no oracle");
      continue;
    }
    try {
      const auto got = sql::execute_sql(item.gold_sql, *snap, opts);
      const auto want = it->second();
      o.check(got == want, item.id + ": executor " + std::to_string(got.size()) + " rows, oracle " +
                               std::to_string(want.size()) + " rows");
      empty += want.empty();
      ++checked;
    } catch (const std::exception& e) {
      o.check(false, item.id + ": " + e.what());
    }
  }
  const double secs = seconds_since(t0);
  o.check(checked >= 20, "only " + std::to_string(checked) + " queries");
  o.check(empty == 0, std::to_string(empty) + " queries with empty oracle results");
  o.check(secs < 10.0, "runtime " + fmt("%.2f", secs) + " s");
  o.detail = std::to_string(checked) + " gold queries, " + fmt("%.3f", secs) + " s";
  return o;
}

// ---------------------------------------------------------------- SAIR

Outcome sair_round_trip() {
  Outcome o;
  const auto snap = test::default_snapshot();
  const sql::ExecOptions opts{test::default_spec().now(), std::nullopt};
  std::size_t pairs = 0;
  auto check_pair = [&](const std::string& id, const std::string& text, const std::string& gold) {
    try {
      const auto ir = sair::parse_sair(text);
      o.check(sair::parse_sair(sair::print(ir)) == ir, id + ": print/parse changed the IR");
      const auto sql = sair::compile(ir);
      o.check(sql::execute_sql(sql, *snap, opts) == sql::execute_sql(gold, *snap, opts), id + ": results differ");
      ++pairs;
      return sql;
    } catch (const std::exception& e) {
      o.check(false, id + ": " + e.what());
      return std::string();
    }
  };

  std::size_t golden = 0;
  for (const auto& p : test::sair_pairs()) {
    const auto sql = check_pair(p.id, p.sair, p.gold_sql);
    const auto path = test::golden_path("sair/" + p.id + ".sql");
    o.check(!sql.empty() && read_file(path) == sql + "\n", p.id + ": golden SQL differs");
    ++golden;
  }

  // the scripted SAIR answers of the fixture test set against its gold SQL
  const auto script = json::parse(read_file(test::data_path("scripts/fixture.json")));
  std::map<std::string, std::string> final_sair;
  for (const auto& s : script["scripts"]) {
    if (s.value("target", "*") != "SAIR") continue;
    for (const auto& r : s["replies"]) {
      const auto draft = pipeline::extract_draft(r.get<std::string>());
      if (!knowledge::parse_tool_call(draft)) final_sair[s["question"]] = draft;
    }
  }
  for (const auto& item : eval::load_testset(test::data_path("testsets/fixture10.jsonl"))) {
    const auto it = final_sair.find(item.question);
    if (it == final_sair.end()) {
      o.check(false, item.id + ": no scripted SAIR answer");
      continue;
    }
    check_pair(item.id, it->second, item.gold_sql);
  }
  o.detail = std::to_string(pairs) + " IR/gold pairs, " + std::to_string(golden) + " golden files";
  return o;
}

// ---------------------------------------------------------------- spatial

double segment_distance(LatLon p, LatLon a, LatLon b) {
  const double dx = b.lon - a.lon, dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = len2 == 0 ? 0 : ((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.lon - (a.lon + t * dx), p.lat - (a.lat + t * dy));
}

Outcome spatial() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t pairs = 0, inside = 0, skipped = 0;
  while (pairs < 1000) {
    // star-shaped polygon around a random centre: simple by construction
    const LatLon c{unit(rng) * 2 - 1, 100 + unit(rng) * 2};
    const int n = 3 + static_cast<int>(unit(rng) * 10);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(unit(rng) * 2 * 3.141592653589793);
    std::sort(angles.begin(), angles.end());
    std::vector<LatLon> ring;
    for (double a : angles) {
      const double r = 0.05 + unit(rng) * 0.3;
      ring.push_back({c.lat + r * std::sin(a), c.lon + r * std::cos(a)});
    }
    Geometry poly;
    try {
      poly = make_polygon(ring);
    } catch (const Error&) {
      continue;  // degenerate draw
    }
    const LatLon p{c.lat + (unit(rng) - 0.5) * 0.8, c.lon + (unit(rng) - 0.5) * 0.8};
    double edge = 1e9;
    for (std::size_t i = 0; i + 1 < poly.vertices.size(); ++i)
      edge = std::min(edge, segment_distance(p, poly.vertices[i], poly.vertices[i + 1]));
    if (edge < 1e-9) {
      ++skipped;
      continue;
    }
    const bool want = oracle::winding_inside(poly.vertices, p);
    const bool got = sql::st_contains(poly, p);
    o.check(got == want, "disagreement at (" + fmt("%.9f", p.lat) + ", " + fmt("%.9f", p.lon) + ")");
    inside += want;
    ++pairs;
  }
  const double d = sql::st_distance({0, 0}, {1, 0});
  o.check(std::abs(d - 60.04) <= 0.05, "distance " + fmt("%.4f", d));
  std::uniform_real_distribution<double> lat(-85, 85), lon(-180, 180);
  for (int i = 0; i < 1000; ++i) {
    const LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    o.check(sql::st_distance(a, b) == sql::st_distance(b, a), "asymmetric distance");
    o.check(std::abs(sql::st_distance(a, b) - oracle::haversine_nm(a, b)) < 1e-6, "distance differs from oracle");
  }
  o.detail = std::to_string(pairs) + " pairs (" + std::to_string(inside) + " inside), distance " + fmt("%.3f", d) +
             " nm";
  return o;
}

// ---------------------------------------------------------------- end to end

eval::ScoreReport fixture_bench(const pipeline::PipelineConfig& config,
                                std::vector<std::shared_ptr<const pipeline::EpisodeTrace>>* traces = nullptr) {
  auto ws = test::default_workspace();
  auto backend = llm::ScriptedBackend::load(test::data_path("scripts/fixture.json"));
  eval::BenchmarkOptions opts;
  opts.representations = llm::all_representations();
  opts.config = config;
  if (traces) {
    opts.on_item = [traces](const eval::TestItem&, const eval::ItemScore&, const pipeline::EpisodeTrace& t) {
      traces->push_back(std::make_shared<pipeline::EpisodeTrace>(t));
    };
  }
  return eval::run_benchmark(eval::load_testset(test::data_path("testsets/fixture10.jsonl")), opts,
                             ws->resources(&backend));
}

Outcome end_to_end() {
  Outcome o;
  const auto a = fixture_bench({});
  const auto b = fixture_bench({});
  o.check(a.overall == 100.0, "overall " + fmt("%.2f", a.overall));
  o.check(a.to_json(false).dump() == b.to_json(false).dump(), "JSON reports differ");
  o.check(a.to_table() == b.to_table(), "text reports differ");

  auto ws = test::default_workspace();
  std::size_t iterations = 0;
  for (bool sair : {true, false}) {
    auto backend = llm::ScriptedBackend::load(test::data_path("scripts/rethink.json"));
    pipeline::PipelineConfig cfg;
    cfg.enable_sair = sair;
    const auto t = pipeline::run_episode("What is the speed of WEST COAST?", cfg, ws->resources(&backend));
    o.check(t.terminal == pipeline::Terminal::Result, "rethink fixture did not reach a result");
    o.check(t.iterations.size() == 2, "rethink took " + std::to_string(t.iterations.size()) + " iterations");
    o.check(!t.iterations.empty() && !t.iterations[0].verdict.ok(), "first draft was accepted");
    iterations = std::max(iterations, t.iterations.size());
  }
  o.detail = "overall " + fmt("%.2f", a.overall) + " over " + std::to_string(a.items.size()) +
             " runs, reports identical, rethink " + std::to_string(iterations) + " iterations";
  return o;
}

Outcome ablation() {
  Outcome o;
  struct Row {
    const char* name;
    bool ner, sair, rt;
  };
  const Row rows[] = {{"#1 full", true, true, true},
                      {"#2 no NER", false, true, true},
                      {"#3 no SAIR", true, false, true},
                      {"#4 no RT", true, true, false}};
  std::string summary;
  for (const auto& row : rows) {
    pipeline::PipelineConfig cfg;
    cfg.enable_ner = row.ner;
    cfg.enable_sair = row.sair;
    cfg.enable_rethink = row.rt;
    std::vector<std::shared_ptr<const pipeline::EpisodeTrace>> traces;
    const auto report = fixture_bench(cfg, &traces);
    o.check(traces.size() == report.items.size() && !traces.empty(), std::string(row.name) + ": missing traces");
    for (const auto& t : traces) {
      const std::string tag = std::string(row.name) + " '" + t->query + "': ";
      o.check(t->terminal == pipeline::Terminal::Result || !t->failure.empty(), tag + "no terminal state");
      if (!row.ner) {
        o.check(t->annotations.empty() && t->probes.empty() && t->bundle.facts.empty(), tag + "NER artifacts");
      }
      if (!row.sair) {
        o.check(t->ir.empty() && t->bundle.target == llm::Target::Sql, tag + "SAIR artifacts");
        for (const auto& it : t->iterations) o.check(it.verdict.ir.empty(), tag + "SAIR verdict");
      }
      if (!row.rt) {
        o.check(t->iterations.size() <= 1, tag + "rethink iterations");
        for (const auto& it : t->iterations) o.check(it.feedback.empty(), tag + "rethink feedback");
      }
    }
    if (!summary.empty()) summary += ", ";
    summary += std::string(row.name) + " " + fmt("%.2f", report.overall);
  }
  o.detail = summary;
  return o;
}

// ---------------------------------------------------------------- generator

std::string table_hashes(const trafficgen::Scenario& sc) {
  sql::TableStore store;
  sc.load_into(store);
  std::string out;
  for (const char* t : {"ship_ais", "ship_ais_quarter", "shp_data", "warn_single"})
    out += std::string(t) + "=" + hex64(fnv1a64(sql::export_csv(*store.snapshot(), t))) + " ";
  return out;
}

Outcome generator() {
  Outcome o;
  auto spec = test::default_spec();
  spec.seed = 42;
  const auto a = trafficgen::generate(spec, test::default_scenario().rules);
  const auto b = trafficgen::generate(spec, test::default_scenario().rules);
  const auto ha = table_hashes(a);
  o.check(ha == table_hashes(b), "CSV hashes differ between runs");

  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
  for (const auto& w : a.warnings) {
    o.check(w.mmsi_a < w.mmsi_b, "warning not ordered");
    o.check(seen.insert({w.mmsi_a, w.mmsi_b, w.ts.seconds}).second, "duplicate warning");
  }
  // warnings must not depend on the order vessels are listed in
  auto reversed = a.samples;
  std::reverse(reversed.begin(), reversed.end());
  const auto again = trafficgen::generate_warnings(reversed, spec.warnings);
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen_rev;
  for (const auto& w : again) seen_rev.insert({w.mmsi_a, w.mmsi_b, w.ts.seconds});
  o.check(seen == seen_rev, "warning set depends on vessel order");
  // and the pairwise computation is symmetric
  std::map<std::int64_t, std::vector<const AisRecord*>> by_time;
  for (const auto& r : a.samples) by_time[r.ts.seconds].push_back(&r);
  for (const auto& [ts, group] : by_time) {
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const auto x = trafficgen::closest_approach(*group[i], *group[j]);
        const auto y = trafficgen::closest_approach(*group[j], *group[i]);
        o.check(std::abs(x.cpa_nm - y.cpa_nm) < 1e-9 && std::abs(x.tcpa_min - y.tcpa_min) < 1e-9, "asymmetric CPA");
      }
  }

  std::map<std::pair<std::int64_t, std::int64_t>, const trafficgen::SampleLabel*> labels;
  for (const auto& l : a.truth.samples) labels[{l.mmsi, l.ts.seconds}] = &l;
  std::size_t checks = 0;
  for (const auto& r : a.samples) {
    const auto it = labels.find({r.mmsi, r.ts.seconds});
    if (it == labels.end()) {
      o.check(false, "sample without label");
      continue;
    }
    for (const auto& s : a.shapes) {
      if (s.obj_type() != ShapeKind::Polygon) continue;
      const bool labelled = std::find(it->second->zones.begin(), it->second->zones.end(), s.name) != it->second->zones.end();
      o.check(labelled == sql::st_contains(s.geometry, {r.lat, r.lon}), "zone label disagrees with st_contains");
      ++checks;
    }
  }
  o.detail = std::to_string(a.warnings.size()) + " warnings, " + std::to_string(checks) + " zone labels, hashes " + ha;
  return o;
}

// ---------------------------------------------------------------- NER

Outcome ner_fixtures() {
  Outcome o;
  const auto lexicon = ner::load_lexicon(test::data_path("type_lexicon.tsv"));
  const auto full = ner::Gazetteer::build(*test::default_snapshot(), lexicon);
  const auto bare = ner::Gazetteer::from_lexicon(lexicon);
  using Tags = std::vector<std::string>;
  const std::vector<std::pair<std::string, Tags>> fixtures = {
      {"What is the current speed and location of vessel sounds like ALABAMA?", {"VESSEL_NAME@ALABAMA"}},
      {"show me the ships in the waterway that may enter the port in the next an hour",
       {"REGION/FAIRWAY@waterway", "REGION/PORT@port", "TEMPORAL/WINDOW@in the next an hour"}},
      {"List MMSI and name of VLCCs and DDVs in the Strait.",
       {"VESSEL_TYPE/VLCC@VLCCs", "VESSEL_TYPE/DDV@DDVs", "REGION/STRAIT@Strait"}},
      {"list mmsi and names of all the vessels which against the speed requirements", {}},
      {"where is West Coast?", {"VESSEL_NAME@West Coast"}},
      {"", {}},
  };
  std::size_t probes = 0;
  for (const auto& [text, want] : fixtures) {
    const auto anns = ner::annotate(text, full);
    Tags got;
    for (std::size_t i = 0; i < anns.size(); ++i) {
      got.push_back(anns[i].tag_path + "@" + anns[i].surface);
      o.check(text.substr(anns[i].start, anns[i].end - anns[i].start) == anns[i].surface, "span mismatch");
      if (i) o.check(anns[i - 1].end <= anns[i].start, "overlapping spans");
    }
    o.check(got == want, "'" + text + "' annotated differently");
  }
  // probes from every gazetteer and a few unresolved or fuzzy variants
  const char* probe_texts[] = {"What is the current speed and location of vessel sounds like ALIBAMA?",
                               "where is West Coast?", "List MMSI and name of VLCCs and DDVs in the Strait.",
                               "ships near the pilot station or the Harbour", "where is Zanzibar Express?"};
  for (const char* text : probe_texts) {
    for (const auto* g : {&full, &bare}) {
      for (const auto& p : ner::verification_queries(ner::annotate(text, *g))) {
        try {
          sql::prepare(p.sql);
          sql::execute_sql(p.sql, *test::default_snapshot(), {test::default_spec().now(), 10});
          ++probes;
        } catch (const std::exception& e) {
          o.check(false, "probe '" + p.sql + "': " + e.what());
        }
      }
    }
  }
  o.check(probes > 0, "no probes emitted");
  o.detail = std::to_string(fixtures.size()) + " sentences, " + std::to_string(probes) + " probes resolved";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric identity", metric_identity},
      {"metric examples", metric_examples},
      {"executor vs oracle", executor_vs_oracle},
      {"SAIR round trip", sair_round_trip},
      {"spatial checks", spatial},
      {"end-to-end determinism", end_to_end},
      {"ablation plumbing", ablation},
      {"generator determinism", generator},
      {"NER fixtures", ner_fixtures},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    for (const auto& p : o.problems) std::printf("        - %s\n", p.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
