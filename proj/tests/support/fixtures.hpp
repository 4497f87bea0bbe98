#pragma once

#include <filesystem>
#include <string>

#include "vtsql/knowledge/rules.hpp"
#include "vtsql/service/service.hpp"
#include "vtsql/sql/store.hpp"
#include "vtsql/trafficgen/trafficgen.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::test {

inline std::string data_path(const std::string& rel) {
  return (std::filesystem::path(VTSQL_TEST_DATA_DIR) / rel).string();
}

inline std::string golden_path(const std::string& rel) {
  return (std::filesystem::path(VTSQL_TEST_GOLDEN_DIR) / rel).string();
}

// VTSQL_UPDATE_GOLDEN=1 rewrites golden files instead of comparing.
inline bool update_golden() {
  const char* v = std::getenv("VTSQL_UPDATE_GOLDEN");
  return v && std::string(v) == "1";
}

inline const trafficgen::ScenarioSpec& default_spec() {
  static const auto spec = trafficgen::load_scenario(data_path("default_scenario.json"));
  return spec;
}

inline const trafficgen::Scenario& default_scenario() {
  static const auto sc = trafficgen::generate(default_spec(), knowledge::load_rules(default_spec().rules_file));
  return sc;
}

inline sql::SnapshotPtr default_snapshot() {
  static const sql::SnapshotPtr snap = [] {
    sql::TableStore store;
    default_scenario().load_into(store);
    return store.snapshot();
  }();
  return snap;
}

// Bundled knowledge plus the default scenario tables.
inline std::unique_ptr<service::Workspace> default_workspace() {
  auto ws = service::Workspace::open(service::WorkspacePaths::bundled(VTSQL_TEST_DATA_DIR));
  default_scenario().load_into(ws->store());
  ws->set_rules(default_scenario().rules);
  return ws;
}

}  // namespace vtsql::test
