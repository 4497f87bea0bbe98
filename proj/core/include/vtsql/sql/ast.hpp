#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vtsql/model/schema.hpp"
#include "vtsql/model/value.hpp"

namespace vtsql::sql {

enum class ExprKind {
  Literal,
  Column,
  Unary,     // NOT, unary minus
  Binary,    // AND, OR, comparisons, arithmetic
  Like,
  In,
  Between,
  IsNull,
  Function,
  Subquery,  // uncorrelated scalar subquery
  Interval,  // INTERVAL n MINUTE; only valid as a +/- operand
};

enum class Op { And, Or, Not, Neg, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };

const char* op_text(Op op);

struct SelectStmt;

struct Expr {
  ExprKind kind = ExprKind::Literal;
  std::size_t pos = 0;  // byte offset of the first token

  Value literal;                     // Literal
  std::int64_t interval_seconds = 0;  // Interval
  std::int64_t interval_amount = 0;
  std::string interval_unit;         // MINUTE, HOUR, ...
  std::string qualifier;             // Column: optional table/alias
  std::string name;                  // Column name or upper-case function name
  Op op = Op::Eq;                    // Unary / Binary
  bool negated = false;              // NOT LIKE / NOT IN / NOT BETWEEN / IS NOT NULL
  std::vector<std::unique_ptr<Expr>> args;
  std::unique_ptr<SelectStmt> subquery;

  // Filled by resolve().
  int source = -1;
  int column = -1;
  ColumnKind column_kind = ColumnKind::Text;
};

using ExprPtr = std::unique_ptr<Expr>;

struct TableRef {
  std::string table;
  std::string alias;
  std::size_t pos = 0;
  const TableDef* def = nullptr;  // filled by resolve()

  const std::string& visible_name() const { return alias.empty() ? table : alias; }
};

struct JoinClause {
  TableRef table;
  ExprPtr on;
};

struct SelectItem {
  ExprPtr expr;              // null for '*'
  std::string alias;
  std::string star_qualifier;  // "t" for t.*
  bool star = false;
};

struct OrderItem {
  ExprPtr expr;
  bool descending = false;
};

struct SelectStmt {
  bool distinct = false;
  std::vector<SelectItem> items;
  TableRef from;
  std::vector<JoinClause> joins;
  ExprPtr where;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
  bool resolved = false;

  std::size_t source_count() const { return 1 + joins.size(); }
  const TableRef& source(std::size_t i) const { return i == 0 ? from : joins[i - 1].table; }
};

using SqlAst = SelectStmt;

// Canonical SQL rendering. Keywords upper-case, single spaces, minimal
// parentheses by precedence.
std::string to_sql(const Expr& e);
std::string to_sql(const SelectStmt& s);

}  // namespace vtsql::sql
