#pragma once

#include <string_view>

#include "vtsql/sql/ast.hpp"

namespace vtsql::sql {

// Syntax only. Throws SYNTAX_ERROR carrying the byte position and the
// offending token. Keywords are case-insensitive; a trailing ';' is allowed.
SqlAst parse_sql(std::string_view text);

// Binds every column reference (source/column slots and kinds), checks
// function names and arities, and resolves scalar subqueries in their own
// scope. Throws SCHEMA_ERROR with the unknown identifier as token and a
// suggestion when one is close.
void resolve(SqlAst& ast, const SchemaRegistry& schema);

// parse_sql + resolve.
SqlAst prepare(std::string_view text,
               const SchemaRegistry& schema = SchemaRegistry::vessel_traffic());

struct FunctionSig {
  std::string_view name;
  std::size_t arity;
};

// Registered scalar functions. ST_CONTAINS(geometry, point),
// ST_DISTANCE(point, point) in nautical miles, SOUNDS_LIKE(text, text),
// POINT(lat, lon), ST_GEOMFROMTEXT(wkt), NOW(), LOWER, UPPER, ABS.
const std::vector<FunctionSig>& sql_functions();

}  // namespace vtsql::sql
