#include "vtsql/model/schema.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql {
namespace {

using K = ColumnKind;

std::vector<ColumnDef> ais_columns() {
  return {
      {"mmsi", K::Integer},      {"ship_name", K::Text}, {"callsign", K::Text},
      {"imo", K::Integer},       {"ship_type", K::Text}, {"length", K::Real},
      {"width", K::Real},        {"tonnage", K::Real},   {"draft", K::Real},
      {"lat", K::Real},          {"lon", K::Real},       {"sog", K::Real},
      {"cog", K::Real},          {"heading", K::Real},   {"nav_status", K::Text},
      {"eta", K::Timestamp},     {"ts", K::Timestamp},
  };
}

std::vector<TableDef> default_tables() {
  return {
      {"ship_ais", ais_columns(), {"mmsi"},
       "Latest AIS report per vessel: static attributes and kinematics."},
      {"ship_ais_quarter", ais_columns(), {"mmsi"},
       "AIS reports sampled every 15 minutes."},
      {"shp_data",
       {{"id", K::Integer},
        {"obj_type", K::Text},
        {"name", K::Text},
        {"geometry", K::Geometry},
        {"region_code", K::Text},
        {"remark", K::Text}},
       {"id"},
       "Named geographic shapes (points and polygons)."},
      {"warn_single",
       {{"id", K::Integer},
        {"mmsi_a", K::Integer},
        {"name_a", K::Text},
        {"mmsi_b", K::Integer},
        {"name_b", K::Text},
        {"cpa_nm", K::Real},
        {"tcpa_min", K::Real},
        {"warn_level", K::Integer},
        {"lat", K::Real},
        {"lon", K::Real},
        {"ts", K::Timestamp}},
       {"id"},
       "Ship encounter warnings with CPA/TCPA per vessel pair."},
  };
}

struct Synonym {
  std::string_view word;
  std::string_view column;
};

constexpr Synonym kSynonyms[] = {
    {"speed", "sog"},          {"knots", "sog"},        {"velocity", "sog"},
    {"course", "cog"},         {"bearing", "heading"},  {"name", "ship_name"},
    {"vessel_name", "ship_name"}, {"shipname", "ship_name"}, {"type", "ship_type"},
    {"vessel_type", "ship_type"}, {"latitude", "lat"},   {"longitude", "lon"},
    {"lng", "lon"},            {"draught", "draft"},     {"status", "nav_status"},
    {"time", "ts"},            {"timestamp", "ts"},      {"loa", "length"},
    {"beam", "width"},         {"gt", "tonnage"},        {"gross_tonnage", "tonnage"},
    {"arrival", "eta"},        {"cpa", "cpa_nm"},        {"tcpa", "tcpa_min"},
    {"geom", "geometry"},      {"shape", "geometry"},    {"zone", "name"},
};

}  // namespace

std::string_view column_kind_name(ColumnKind kind) {
  switch (kind) {
    case K::Integer: return "integer";
    case K::Real: return "real";
    case K::Text: return "text";
    case K::Timestamp: return "timestamp";
    case K::Geometry: return "geometry";
  }
  return "text";
}

std::optional<std::size_t> TableDef::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, column)) return i;
  }
  return std::nullopt;
}

SchemaRegistry::SchemaRegistry(std::vector<TableDef> tables)
    : tables_(std::move(tables)) {
  std::set<std::string> names;
  for (const auto& t : tables_) {
    if (!names.insert(t.name).second) {
      throw Error(Errc::SchemaError, "duplicate table " + t.name);
    }
    std::set<std::string> cols;
    for (const auto& c : t.columns) {
      if (!cols.insert(c.name).second) {
        throw Error(Errc::SchemaError, "duplicate column " + t.name + "." + c.name);
      }
    }
    for (const auto& k : t.key_columns) {
      if (!cols.count(k)) {
        throw Error(Errc::SchemaError, "key column " + k + " missing in " + t.name);
      }
    }
  }
}

const SchemaRegistry& SchemaRegistry::vessel_traffic() {
  static const SchemaRegistry registry(default_tables());
  return registry;
}

const TableDef* SchemaRegistry::find(std::string_view table) const {
  for (const auto& t : tables_) {
    if (iequals(t.name, table)) return &t;
  }
  return nullptr;
}

const TableDef& SchemaRegistry::at(std::string_view table) const {
  if (const auto* t = find(table)) return *t;
  Error err(Errc::SchemaError, "unknown table " + std::string(table));
  err.with_token(std::string(table));
  if (auto s = suggest_table(table); !s.empty()) err.with_suggestion(s);
  throw err;
}

std::string SchemaRegistry::suggest_column(
    std::string_view unknown, const std::vector<const TableDef*>& scope) const {
  const std::string needle = to_lower(unknown);
  auto in_scope = [&](std::string_view column) {
    return std::any_of(scope.begin(), scope.end(), [&](const TableDef* t) {
      return t->column_index(column).has_value();
    });
  };
  for (const auto& syn : kSynonyms) {
    if (syn.word == needle && in_scope(syn.column)) return std::string(syn.column);
  }
  std::string best;
  std::size_t best_dist = std::max<std::size_t>(2, needle.size() / 3) + 1;
  for (const auto* t : scope) {
    for (const auto& c : t->columns) {
      const std::size_t d = edit_distance(needle, c.name);
      if (d < best_dist) {
        best_dist = d;
        best = c.name;
      }
    }
  }
  return best;
}

std::string SchemaRegistry::suggest_table(std::string_view unknown) const {
  const std::string needle = to_lower(unknown);
  std::string best;
  std::size_t best_dist = 4;
  for (const auto& t : tables_) {
    const std::size_t d = edit_distance(needle, t.name);
    if (d < best_dist) {
      best_dist = d;
      best = t.name;
    }
  }
  return best;
}

nlohmann::json SchemaRegistry::to_json() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : tables_) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : t.columns) {
      cols.push_back({{"name", c.name}, {"kind", column_kind_name(c.kind)}});
    }
    tables.push_back({{"name", t.name},
                      {"columns", cols},
                      {"key_columns", t.key_columns},
                      {"description", t.description}});
  }
  return {{"tables", tables}};
}

}  // namespace vtsql
