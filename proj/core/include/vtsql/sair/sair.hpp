#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vtsql/model/schema.hpp"
#include "vtsql/model/value.hpp"

namespace vtsql::sair {

enum class TermKind {
  Column,    // name or qualifier.name
  Literal,   // 'text', integer, real, (ts '...')
  Interval,  // (minutes n); only as an operand of + or -
  Now,       // (now)
  Logic,     // and / or (n-ary), not (unary)
  Compare,   // = <> < > <= >=
  Arith,     // + - * /
  Like,
  In,        // (in expr v1 v2 ...)
  Between,   // (between expr lo hi)
  IsNull,
  Contains,  // (st_contains shape (lat lon))
  Call,      // registered scalar function
};

// Either a shp_data row by name or an inline polygon.
struct ShapeRef {
  std::string name;
  std::vector<LatLon> polygon;

  bool inline_polygon() const { return name.empty(); }
  friend bool operator==(const ShapeRef&, const ShapeRef&) = default;
};

struct Term {
  TermKind kind = TermKind::Literal;
  std::string head;       // operator symbol or lower-case function name
  std::string qualifier;  // Column
  std::string name;       // Column
  Value literal;          // Literal
  std::int64_t minutes = 0;
  ShapeRef shape;         // Contains
  std::vector<Term> args;
  std::size_t pos = 0;
  std::string binding;    // visible name of the source a Column resolved to

  // Structural equality; positions and bindings are ignored.
  friend bool operator==(const Term& a, const Term& b);
};

enum class NodeKind { Project, Select, Join, Rel };

struct Node {
  NodeKind kind = NodeKind::Rel;
  std::string table;          // Rel
  std::string alias;          // Rel
  std::vector<Term> columns;  // Project; a single Column "*" selects everything
  std::optional<Term> pred;   // Select predicate or Join condition
  std::vector<Node> children;
  std::size_t pos = 0;

  friend bool operator==(const Node& a, const Node& b);
};

using SairExpr = Node;

// Parses and resolves. SAIR_SYNTAX_ERROR for malformed text or a missing
// root projection, SAIR_SCHEMA_ERROR for unknown tables or columns (with
// a suggestion when one is close).
SairExpr parse_sair(std::string_view text,
                    const SchemaRegistry& schema = SchemaRegistry::vessel_traffic());

// Canonical single-line serializer; parse_sair(print(e)) == e.
std::string print(const SairExpr& e);
std::string print(const Term& t);

// Deterministic SQL in the executor's subset. Columns whose name occurs in
// more than one joined table are qualified with their binding.
std::string compile(const SairExpr& e,
                    const SchemaRegistry& schema = SchemaRegistry::vessel_traffic());

// SQL text of a standalone predicate, e.g. a rule or window fragment.
std::string compile_predicate(const Term& pred);

// One line per relational node, pre-order, indented by depth.
std::vector<std::string> explain(const SairExpr& e);

}  // namespace vtsql::sair
