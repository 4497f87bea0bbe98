#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "vtsql/model/result_set.hpp"
#include "vtsql/sql/ast.hpp"
#include "vtsql/sql/store.hpp"

namespace vtsql::sql {

struct ExecOptions {
  Timestamp now{};                       // value of NOW(); never the wall clock
  std::optional<std::size_t> row_limit;  // extra cap applied after LIMIT
};

// One row pointer per FROM/JOIN source, in statement order.
using Tuple = std::vector<const Row*>;

class EvalContext {
 public:
  EvalContext(const Snapshot& snapshot, Timestamp now) : snapshot_(snapshot), now_(now) {}

  const Snapshot& snapshot() const { return snapshot_; }
  Timestamp now() const { return now_; }
  const Value& scalar_subquery(const Expr& e);

 private:
  const Snapshot& snapshot_;
  Timestamp now_;
  std::map<const Expr*, Value> subquery_cache_;
};

// Scalar evaluation over a bound tuple. Booleans are integers 1/0 and
// NULL is unknown. Throws RUNTIME_ERROR on type mismatches and
// NOT_A_POLYGON when ST_CONTAINS gets a point.
Value evaluate(const Expr& e, const Tuple& tuple, EvalContext& ctx);

// nullopt for NULL; throws RUNTIME_ERROR for non-boolean values.
std::optional<bool> truth_value(const Value& v);

// Three-way comparison under the executor's coercion rules; nullopt when
// either side is NULL.
std::optional<int> compare_values(const Value& a, const Value& b);

// Output column names for the statement's select list.
std::vector<std::string> output_columns(const SqlAst& ast);

// Full execution: single-table predicates are pushed down, equi-joins are
// hashed, then projection, ORDER BY, set deduplication, LIMIT.
ResultSet execute(const SqlAst& ast, const Snapshot& snapshot, const ExecOptions& options = {});

// prepare() + execute().
ResultSet execute_sql(std::string_view sql, const Snapshot& snapshot,
                      const ExecOptions& options = {});

// shp_data names looked up by scalar subqueries of the form
// (SELECT geometry FROM shp_data WHERE name = '...').
std::vector<std::string> referenced_shapes(const SqlAst& ast);

}  // namespace vtsql::sql
