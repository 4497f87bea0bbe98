#include <doctest.h>

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "support/fixtures.hpp"
#include "vtsql/service/service.hpp"

using namespace vtsql;
using namespace vtsql::service;
using nlohmann::json;

namespace {

const char* kDemo =
    "List draft and type information of VLCC and deep-draught vessel in the strait, show them on the Chart";

struct Fixture {
  std::unique_ptr<Workspace> ws = test::default_workspace();
  llm::ScriptedBackend backend = llm::ScriptedBackend::load(test::data_path("scripts/fixture.json"));
  ServiceConfig config;
  std::unique_ptr<Service> svc;
  explicit Fixture(ServiceConfig c = {}) : config(std::move(c)) {
    svc = std::make_unique<Service>(config, *ws, backend);
  }
};

json strip_timings(json j) {
  if (j.contains("trace")) j["trace"].erase("timings");
  return j;
}

}  // namespace

TEST_CASE("empty text is 422, unloaded store is 503") {
  Fixture f;
  CHECK(f.svc->query({{"text", ""}}).status == 422);
  CHECK(f.svc->query({{"text", "   "}}).status == 422);
  CHECK(f.svc->query({{"text", ""}}).body["error"] == "EMPTY_TEXT");

  auto bare = Workspace::open(WorkspacePaths::bundled(VTSQL_TEST_DATA_DIR));
  llm::ScriptedBackend be;
  Service empty({}, *bare, be);
  CHECK(empty.query({{"text", "where is West Coast?"}}).status == 503);
  CHECK(empty.vessels().status == 503);
  CHECK(empty.zones().status == 503);
}

TEST_CASE("vessels and zones") {
  Fixture f;
  const auto v = f.svc->vessels();
  CHECK(v.status == 200);
  REQUIRE(v.body["vessels"].size() == 20);
  for (std::size_t i = 1; i < 20; ++i) CHECK(v.body["vessels"][i - 1]["mmsi"] < v.body["vessels"][i]["mmsi"]);
  const auto z = f.svc->zones();
  REQUIRE(z.body["zones"].size() == 6);
  CHECK(z.body["zones"][0]["id"] == 1);
  CHECK(z.body["zones"][5]["obj_type"] == "POINT");
}

TEST_CASE("demo query returns rows, highlights and zones") {
  Fixture f;
  const auto r = f.svc->query({{"text", kDemo}});
  REQUIRE(r.status == 200);
  CHECK(r.body["terminal"] == "RESULT");
  CHECK_FALSE(r.body["ir"].get<std::string>().empty());
  CHECK(r.body["columns"] == json::array({"mmsi", "ship_name", "draft", "ship_type"}));
  const auto& rows = r.body["rows"];
  REQUIRE_FALSE(rows.empty());
  CHECK(r.body["highlights"].size() == rows.size());
  REQUIRE(r.body["zones"].size() == 1);
  CHECK(r.body["zones"][0]["name"] == "strait");

  // every labelled in-strait VLCC or DDV is highlighted
  std::set<std::int64_t> want, got;
  for (const auto& v : test::default_scenario().truth.vessels) {
    const bool in_strait = std::find(v.zones.begin(), v.zones.end(), "strait") != v.zones.end();
    if (in_strait && (v.ship_type == "VLCC" || v.ddv)) want.insert(v.mmsi);
  }
  for (const auto& h : r.body["highlights"]) {
    got.insert(h["mmsi"].get<std::int64_t>());
    CHECK(h.contains("lat"));
    CHECK(h.contains("lon"));
  }
  CHECK(got == want);
  CHECK(r.body["trace"]["annotations"].size() >= 3);
}

TEST_CASE("identical inputs give identical payloads modulo timings and session") {
  Fixture a, b;
  auto ra = strip_timings(a.svc->query({{"text", "where is West Coast?"}}).body);
  auto rb = strip_timings(b.svc->query({{"text", "where is West Coast?"}}).body);
  CHECK(ra["session_id"] != rb["session_id"]);
  ra.erase("session_id");
  rb.erase("session_id");
  CHECK(ra.dump() == rb.dump());
}

TEST_CASE("episode failure is 200 with the failure visible") {
  Fixture f;
  const auto r = f.svc->query({{"text", "a question nobody scripted"}});
  CHECK(r.status == 200);
  CHECK(r.body["terminal"] == "FAILED");
  CHECK(r.body["failure"].get<std::string>().find("SCRIPT_MISS") != std::string::npos);
  CHECK(r.body["rows"].empty());
}

TEST_CASE("sessions, representation and style") {
  Fixture f;
  const auto first = f.svc->query({{"text", "where is West Coast?"}});
  const std::string sid = first.body["session_id"];
  const auto again = f.svc->query({{"text", "where is West Coast?"}, {"session_id", sid}, {"representation", "markdown"}});
  CHECK(again.status == 200);
  CHECK(again.body["session_id"] == sid);
  CHECK(again.body["trace"]["config"]["representation"] == "MARKDOWN");
  CHECK(f.svc->sessions().last(sid) != nullptr);
  CHECK(f.svc->query({{"text", "x"}, {"session_id", "deadbeef"}}).status == 404);
  CHECK(f.svc->query({{"text", "x"}, {"representation", "yaml"}}).status == 400);
  CHECK(f.svc->query({{"text", "x"}, {"style", "poetic"}}).status == 400);
  CHECK(f.svc->query({{"text", "where is West Coast?"}, {"style", "formal"}}).body["trace"]["style"] == "FORMAL");
}

TEST_CASE("queries do not mutate the store") {
  Fixture f;
  const auto before = f.ws->store().version();
  for (int i = 0; i < 3; ++i) f.svc->query({{"text", kDemo}});
  CHECK(f.ws->store().version() == before);
}

TEST_CASE("config parsing") {
  const auto c = ServiceConfig::from_json({{"port", 9001},
                                           {"cors_origin", "http://localhost:5173"},
                                           {"api_key", "k"},
                                           {"session_idle_s", 60},
                                           {"max_inflight", 2},
                                           {"pipeline", {{"enable_ner", false}}}});
  CHECK(c.port == 9001);
  CHECK(c.session_idle == std::chrono::seconds(60));
  CHECK(c.max_inflight == 2);
  CHECK_FALSE(c.pipeline.enable_ner);
  CHECK(ServiceConfig::from_json(json::object()).port == 8080);
}

TEST_CASE("http routes") {
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.api_key = "k";
  cfg.cors_origin = "http://console.local";
  Fixture f(cfg);
  const int port = f.svc->bind();
  REQUIRE(port > 0);
  std::thread t([&] { f.svc->serve(); });
  httplib::Client cli("127.0.0.1", port);
  httplib::Headers auth{{"X-API-Key", "k"}};

  const auto unauth = cli.Get("/api/vessels");
  REQUIRE(unauth);
  CHECK(unauth->status == 401);

  const auto vessels = cli.Get("/api/vessels", auth);
  REQUIRE(vessels);
  CHECK(vessels->status == 200);
  CHECK(json::parse(vessels->body)["vessels"].size() == 20);
  CHECK(vessels->get_header_value("Access-Control-Allow-Origin") == "http://console.local");

  const auto q = cli.Post("/api/query", auth, json{{"text", "where is West Coast?"}}.dump(), "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(json::parse(q->body)["rows"].size() == 1);

  const auto bad = cli.Post("/api/query", auth, "not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const auto empty = cli.Post("/api/query", auth, json{{"text", ""}}.dump(), "application/json");
  REQUIRE(empty);
  CHECK(empty->status == 422);

  const auto pre = cli.Options("/api/query");
  REQUIRE(pre);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  f.svc->stop();
  t.join();
}
