#include "vtsql/sql/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>

#include "vtsql/error.hpp"
#include "vtsql/util/csv.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sql {
namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim_view(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

bool parse_real(std::string_view s, double& out) {
  s = trim_view(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty() &&
         std::isfinite(out);
}

[[noreturn]] void kind_error(std::string_view what, ColumnKind kind) {
  throw Error(Errc::KindError, "value '" + std::string(what) + "' is not a valid " +
                                   std::string(column_kind_name(kind)));
}

const char* kDdl[] = {"BIGINT", "DOUBLE", "VARCHAR(128)", "DATETIME", "GEOMETRY"};

}  // namespace

const Table& Snapshot::table(std::string_view name) const {
  if (const auto* t = find(name)) return *t;
  Error err(Errc::SchemaError, "unknown table " + std::string(name));
  err.with_token(std::string(name));
  throw err;
}

const Table* Snapshot::find(std::string_view name) const {
  const auto it = tables_.find(to_lower(name));
  return it == tables_.end() ? nullptr : it->second.get();
}

std::shared_ptr<const Table> Snapshot::shared_table(std::string_view name) const {
  const auto it = tables_.find(to_lower(name));
  return it == tables_.end() ? nullptr : it->second;
}

std::size_t Snapshot::total_rows() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tables_) n += t->rows.size();
  return n;
}

std::vector<AisRecord> Snapshot::vessels() const {
  std::vector<AisRecord> out;
  if (const auto* t = find("ship_ais")) {
    for (const auto& r : t->rows) out.push_back(AisRecord::from_row(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const AisRecord& a, const AisRecord& b) { return a.mmsi < b.mmsi; });
  return out;
}

std::vector<GeoShape> Snapshot::shapes() const {
  std::call_once(shapes_once_, [this] {
    if (const auto* t = find("shp_data")) {
      for (const auto& r : t->rows) shape_cache_.push_back(GeoShape::from_row(r));
    }
    std::stable_sort(shape_cache_.begin(), shape_cache_.end(),
                     [](const GeoShape& a, const GeoShape& b) { return a.id < b.id; });
  });
  return shape_cache_;
}

const GeoShape* Snapshot::find_shape(std::string_view name) const {
  shapes();
  for (const auto& s : shape_cache_) {
    if (iequals(trim_view(s.name), trim_view(name))) return &s;
  }
  return nullptr;
}

Value conform(const Value& v, ColumnKind kind) {
  if (is_null(v)) return v;
  switch (kind) {
    case ColumnKind::Integer: {
      if (std::holds_alternative<std::int64_t>(v)) return v;
      if (const auto* d = std::get_if<double>(&v)) {
        if (std::floor(*d) == *d && std::fabs(*d) < 9.2e18) {
          return static_cast<std::int64_t>(*d);
        }
        kind_error(format_number(*d), kind);
      }
      if (const auto* s = std::get_if<std::string>(&v)) {
        std::int64_t i = 0;
        if (parse_int(*s, i)) return i;
        kind_error(*s, kind);
      }
      break;
    }
    case ColumnKind::Real: {
      if (std::holds_alternative<double>(v)) return v;
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      if (const auto* s = std::get_if<std::string>(&v)) {
        double d = 0;
        if (parse_real(*s, d)) return d;
        kind_error(*s, kind);
      }
      break;
    }
    case ColumnKind::Text:
      if (std::holds_alternative<std::string>(v)) return v;
      break;
    case ColumnKind::Timestamp: {
      if (std::holds_alternative<Timestamp>(v)) return v;
      if (const auto* s = std::get_if<std::string>(&v)) {
        if (auto ts = parse_timestamp(*s)) return *ts;
        kind_error(*s, kind);
      }
      break;
    }
    case ColumnKind::Geometry: {
      if (std::holds_alternative<GeometryPtr>(v)) return v;
      if (const auto* s = std::get_if<std::string>(&v)) {
        try {
          return std::make_shared<const Geometry>(parse_wkt(*s));
        } catch (const Error&) {
          kind_error(*s, kind);
        }
      }
      break;
    }
  }
  kind_error(display_value(v), kind);
}

TableStore::TableStore(const SchemaRegistry& schema) : schema_(schema) {
  std::map<std::string, std::shared_ptr<const Table>> empty;
  for (const auto& def : schema_.tables()) {
    auto t = std::make_shared<Table>();
    t->def = &def;
    empty.emplace(to_lower(def.name), std::move(t));
  }
  current_ = std::make_shared<const Snapshot>(0, std::move(empty));
}

SnapshotPtr TableStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::shared_ptr<const Table> TableStore::checked_table(const TableDef& def,
                                                       std::vector<Row> rows,
                                                       const Table* base) const {
  auto t = std::make_shared<Table>();
  t->def = &def;
  if (base) t->rows = base->rows;
  t->rows.reserve(t->rows.size() + rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != def.columns.size()) {
      throw Error(Errc::ArityMismatch, def.name + " row " + std::to_string(r + 1) +
                                           " has " + std::to_string(row.size()) +
                                           " cells, expected " +
                                           std::to_string(def.columns.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      try {
        row[c] = conform(row[c], def.columns[c].kind);
      } catch (const Error& e) {
        throw Error(Errc::KindError, def.name + " row " + std::to_string(r + 1) +
                                         ", column " + def.columns[c].name + ": " +
                                         e.what());
      }
    }
    t->rows.push_back(std::move(row));
  }
  return t;
}

void TableStore::append(std::string_view table, std::vector<Row> rows) {
  std::lock_guard writer(write_mutex_);
  const TableDef& def = schema_.at(table);
  SnapshotPtr base = snapshot();
  std::map<std::string, std::shared_ptr<const Table>> tables;
  for (const auto& d : schema_.tables()) {
    const std::string key = to_lower(d.name);
    if (key == to_lower(def.name)) {
      tables.emplace(key, checked_table(def, std::move(rows), base->find(key)));
    } else {
      tables.emplace(key, base->shared_table(key));
    }
  }
  auto next = std::make_shared<const Snapshot>(base->version() + 1, std::move(tables));
  std::lock_guard lock(mutex_);
  current_ = std::move(next);
}

void TableStore::replace(std::map<std::string, std::vector<Row>> replacement) {
  std::lock_guard writer(write_mutex_);
  SnapshotPtr base = snapshot();
  std::map<std::string, std::shared_ptr<const Table>> tables;
  for (auto& [name, rows] : replacement) schema_.at(name);
  for (const auto& d : schema_.tables()) {
    const std::string key = to_lower(d.name);
    auto it = std::find_if(replacement.begin(), replacement.end(),
                           [&](const auto& kv) { return iequals(kv.first, d.name); });
    if (it != replacement.end()) {
      tables.emplace(key, checked_table(d, std::move(it->second), nullptr));
    } else {
      tables.emplace(key, base->shared_table(key));
    }
  }
  auto next = std::make_shared<const Snapshot>(base->version() + 1, std::move(tables));
  std::lock_guard lock(mutex_);
  current_ = std::move(next);
}

std::size_t TableStore::load_csv(const std::string& path, std::string_view table) {
  const TableDef& def = schema_.at(table);
  const auto records = parse_csv(read_file(path));
  if (records.empty()) throw Error(Errc::HeaderMismatch, path + ": missing header row");
  const auto& header = records.front().fields;
  bool ok = header.size() == def.columns.size();
  for (std::size_t i = 0; ok && i < header.size(); ++i) {
    ok = trim_view(header[i]) == def.columns[i].name;
  }
  if (!ok) {
    std::vector<std::string> expected;
    for (const auto& c : def.columns) expected.push_back(c.name);
    throw Error(Errc::HeaderMismatch, path + ": header does not match " + def.name +
                                          " (expected " + join(expected, ",") + ")");
  }
  std::vector<Row> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != def.columns.size()) {
      throw Error(Errc::KindError, path + " line " + std::to_string(records[r].line) +
                                       ": expected " + std::to_string(def.columns.size()) +
                                       " fields, got " + std::to_string(fields.size()));
    }
    Row row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto kind = def.columns[c].kind;
      if (fields[c].empty() && kind != ColumnKind::Text) {
        row.emplace_back();
        continue;
      }
      try {
        row.push_back(kind == ColumnKind::Text ? Value{fields[c]}
                                               : conform(Value{fields[c]}, kind));
      } catch (const Error&) {
        Error err(Errc::KindError, path + " row " + std::to_string(r) + ", column " +
                                       def.columns[c].name + ": '" + fields[c] +
                                       "' is not a valid " +
                                       std::string(column_kind_name(kind)));
        err.with_token(def.columns[c].name);
        throw err;
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  append(def.name, std::move(rows));
  return n;
}

std::map<std::string, std::size_t> TableStore::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::Io, "not a directory: " + dir);
  std::map<std::string, std::size_t> counts;
  for (const auto& def : schema_.tables()) {
    const fs::path p = fs::path(dir) / (def.name + ".csv");
    if (fs::exists(p)) counts[def.name] = load_csv(p.string(), def.name);
  }
  if (counts.empty()) throw Error(Errc::Io, "no table CSV files found in " + dir);
  return counts;
}

std::string export_csv(const Snapshot& snap, std::string_view table) {
  const Table& t = snap.table(table);
  std::string out;
  for (std::size_t c = 0; c < t.def->columns.size(); ++c) {
    if (c) out += ',';
    out += t.def->columns[c].name;
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_escape(display_value(row[c]));
    }
    out += '\n';
  }
  return out;
}

std::string export_sql(const Snapshot& snap, const SchemaRegistry& schema) {
  std::string out;
  for (const auto& def : schema.tables()) {
    out += "CREATE TABLE IF NOT EXISTS " + def.name + " (\n";
    for (std::size_t c = 0; c < def.columns.size(); ++c) {
      out += "  " + def.columns[c].name + " " +
             kDdl[static_cast<int>(def.columns[c].kind)];
      if (c + 1 < def.columns.size()) out += ',';
      out += '\n';
    }
    out += ");\n";
    const Table* t = snap.find(def.name);
    if (!t) continue;
    for (const auto& row : t->rows) {
      out += "INSERT INTO " + def.name + " VALUES (";
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ", ";
        const Value& v = row[c];
        if (is_null(v)) {
          out += "NULL";
        } else if (std::holds_alternative<std::int64_t>(v) ||
                   std::holds_alternative<double>(v)) {
          out += display_value(v);
        } else if (const auto* g = std::get_if<GeometryPtr>(&v)) {
          out += "ST_GeomFromText(" + sql_quote(to_wkt(**g)) + ")";
        } else {
          out += sql_quote(display_value(v));
        }
      }
      out += ");\n";
    }
  }
  return out;
}

}  // namespace vtsql::sql
