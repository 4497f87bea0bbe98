#include "vtsql/model/result_set.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql {
namespace {

std::vector<std::size_t> name_order(std::span<const std::string> columns) {
  std::vector<std::size_t> order(columns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return to_lower(columns[a]) < to_lower(columns[b]);
  });
  return order;
}

CanonicalRow apply_order(const std::vector<std::size_t>& order,
                         std::span<const Value> row) {
  CanonicalRow out;
  out.reserve(row.size());
  for (std::size_t idx : order) out.push_back(normalize_value(row[idx]));
  return out;
}

nlohmann::json cell_json(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return display_value(v);
}

}  // namespace

CanonicalRow canonical_row(std::span<const std::string> columns,
                           std::span<const Value> row) {
  if (columns.size() != row.size()) {
    throw Error(Errc::ArityMismatch, "row has " + std::to_string(row.size()) +
                                         " cells for " +
                                         std::to_string(columns.size()) + " columns");
  }
  return apply_order(name_order(columns), row);
}

ResultSet::ResultSet(std::vector<std::string> columns)
    : columns_(std::move(columns)), order_(name_order(columns_)) {}

bool ResultSet::add_row(Row row) {
  if (row.size() != columns_.size()) {
    throw Error(Errc::ArityMismatch, "row arity does not match result columns");
  }
  if (!canonical_.insert(apply_order(order_, row)).second) return false;
  rows_.push_back(std::move(row));
  return true;
}

std::optional<std::size_t> ResultSet::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (iequals(columns_[i], name)) return i;
  }
  return std::nullopt;
}

bool operator==(const ResultSet& a, const ResultSet& b) {
  if (a.canonical_ != b.canonical_) return false;
  std::vector<std::string> ca, cb;
  for (const auto& c : a.columns_) ca.push_back(to_lower(c));
  for (const auto& c : b.columns_) cb.push_back(to_lower(c));
  std::sort(ca.begin(), ca.end());
  std::sort(cb.begin(), cb.end());
  return ca == cb;
}

nlohmann::json ResultSet::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& v : r) cells.push_back(cell_json(v));
    rows.push_back(std::move(cells));
  }
  return {{"columns", columns_}, {"rows", rows}};
}

}  // namespace vtsql
