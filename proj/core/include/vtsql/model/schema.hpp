#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vtsql {

enum class ColumnKind { Integer, Real, Text, Timestamp, Geometry };

std::string_view column_kind_name(ColumnKind kind);

struct ColumnDef {
  std::string name;
  ColumnKind kind;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> key_columns;
  std::string description;

  std::optional<std::size_t> column_index(std::string_view column) const;
};

// The four-table vessel traffic schema. Immutable; obtain the shared
// instance through SchemaRegistry::vessel_traffic().
class SchemaRegistry {
 public:
  explicit SchemaRegistry(std::vector<TableDef> tables);

  static const SchemaRegistry& vessel_traffic();

  const std::vector<TableDef>& tables() const { return tables_; }
  const TableDef* find(std::string_view table) const;
  const TableDef& at(std::string_view table) const;  // throws SCHEMA_ERROR

  // Closest known column among the given tables for an unknown identifier,
  // using a small synonym table first ("speed" -> "sog") and edit distance
  // as the fallback. Empty when no candidate is reasonably close.
  std::string suggest_column(std::string_view unknown,
                             const std::vector<const TableDef*>& scope) const;
  std::string suggest_table(std::string_view unknown) const;

  // {"tables": [{"name", "columns": [{"name", "kind"}], "key_columns"}]}
  nlohmann::json to_json() const;

 private:
  std::vector<TableDef> tables_;
};

}  // namespace vtsql
