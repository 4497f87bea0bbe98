#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vtsql/model/records.hpp"

namespace vtsql {

using CanonicalRow = std::vector<std::string>;

// Cells reordered by ascending column name (stable for duplicates), each
// passed through normalize_value. Throws ARITY_MISMATCH.
CanonicalRow canonical_row(std::span<const std::string> columns,
                           std::span<const Value> row);

// Ordered columns plus a duplicate-free row list. Rows keep insertion
// order for display; identity is the canonical row.
class ResultSet {
 public:
  ResultSet() = default;
  explicit ResultSet(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  // Returns false when an equal canonical row is already present.
  bool add_row(Row row);

  const std::set<CanonicalRow>& canonical_rows() const { return canonical_; }

  std::optional<std::size_t> column_index(std::string_view name) const;

  // Same canonical row set and same column-name multiset (case-insensitive).
  friend bool operator==(const ResultSet& a, const ResultSet& b);

  // {"columns": [...], "rows": [[...display values...]]}
  nlohmann::json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::size_t> order_;  // column permutation for canonical rows
  std::vector<Row> rows_;
  std::set<CanonicalRow> canonical_;
};

}  // namespace vtsql
