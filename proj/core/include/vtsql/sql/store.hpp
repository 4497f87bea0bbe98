#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "vtsql/model/records.hpp"
#include "vtsql/model/schema.hpp"

namespace vtsql::sql {

struct Table {
  const TableDef* def = nullptr;
  std::vector<Row> rows;
};

// Immutable view of every table at one version. Queries run against a
// single snapshot for their whole lifetime.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(std::uint64_t version, std::map<std::string, std::shared_ptr<const Table>> tables)
      : version_(version), tables_(std::move(tables)) {}

  std::uint64_t version() const { return version_; }
  const Table& table(std::string_view name) const;  // throws SCHEMA_ERROR
  const Table* find(std::string_view name) const;
  std::shared_ptr<const Table> shared_table(std::string_view name) const;
  std::size_t total_rows() const;

  // Typed views over the current rows.
  std::vector<AisRecord> vessels() const;  // ship_ais ordered by mmsi
  std::vector<GeoShape> shapes() const;    // shp_data ordered by id
  const GeoShape* find_shape(std::string_view name) const;

 private:
  std::uint64_t version_ = 0;
  std::map<std::string, std::shared_ptr<const Table>> tables_;
  mutable std::once_flag shapes_once_;
  mutable std::vector<GeoShape> shape_cache_;
};

using SnapshotPtr = std::shared_ptr<const Snapshot>;

// Coerces a cell to the column kind. Integers widen to reals; text that
// parses as a timestamp is accepted for timestamp columns.
Value conform(const Value& v, ColumnKind kind);

// Holds the current snapshot. Writers are serialized and publish a fresh
// snapshot; readers grab the shared pointer and never block writers for
// longer than the pointer copy.
class TableStore {
 public:
  explicit TableStore(const SchemaRegistry& schema = SchemaRegistry::vessel_traffic());

  SnapshotPtr snapshot() const;
  std::uint64_t version() const { return snapshot()->version(); }
  const SchemaRegistry& schema() const { return schema_; }

  // Appends rows kind-checked against the table's columns; one version bump.
  void append(std::string_view table, std::vector<Row> rows);
  // Replaces several tables at once; one version bump.
  void replace(std::map<std::string, std::vector<Row>> tables);

  // Header must list the table's columns in schema order. Returns the
  // number of rows appended.
  std::size_t load_csv(const std::string& path, std::string_view table);
  // Loads <dir>/<table>.csv for every table present; returns rows per table.
  std::map<std::string, std::size_t> load_dir(const std::string& dir);

 private:
  std::shared_ptr<const Table> checked_table(const TableDef& def, std::vector<Row> rows,
                                             const Table* base) const;

  const SchemaRegistry& schema_;
  mutable std::mutex mutex_;  // guards current_
  std::mutex write_mutex_;
  SnapshotPtr current_;
};

// CSV rendering of one table (header + rows), RFC 4180 quoting.
std::string export_csv(const Snapshot& snap, std::string_view table);
// CREATE TABLE + INSERT statements for replay against a MySQL server.
std::string export_sql(const Snapshot& snap, const SchemaRegistry& schema);

}  // namespace vtsql::sql
