#include <set>

#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sair {
namespace {

struct Source {
  std::string table;
  std::string alias;
  std::vector<const Term*> on;
};

struct Flat {
  std::vector<Source> sources;
  std::vector<const Term*> where;
};

void flatten(const Node& n, Flat& f) {
  switch (n.kind) {
    case NodeKind::Rel:
      f.sources.push_back({n.table, n.alias, {}});
      return;
    case NodeKind::Select:
      f.where.push_back(&*n.pred);
      flatten(n.children[0], f);
      return;
    case NodeKind::Join:
      flatten(n.children[0], f);
      flatten(n.children[1], f);
      f.sources.back().on.push_back(&*n.pred);
      return;
    case NodeKind::Project:
      flatten(n.children[0], f);
      return;
  }
}

class SqlWriter {
 public:
  explicit SqlWriter(std::set<std::string> ambiguous) : ambiguous_(std::move(ambiguous)) {}

  std::string term(const Term& t) const {
    switch (t.kind) {
      case TermKind::Column:
        if (t.name == "*") return "*";
        if (!t.qualifier.empty()) return t.qualifier + "." + t.name;
        if (ambiguous_.count(to_lower(t.name)) && !t.binding.empty()) return t.binding + "." + t.name;
        return t.name;
      case TermKind::Literal:
        if (const auto* s = std::get_if<std::string>(&t.literal)) return sql_quote(*s);
        if (const auto* i = std::get_if<std::int64_t>(&t.literal)) return std::to_string(*i);
        if (const auto* d = std::get_if<double>(&t.literal)) {
          std::string s = format_number(*d);
          if (s.find_first_of(".e") == std::string::npos) s += ".0";
          return s;
        }
        if (const auto* ts = std::get_if<Timestamp>(&t.literal)) {
          return "TIMESTAMP '" + format_timestamp_sql(*ts) + "'";
        }
        return "NULL";
      case TermKind::Interval:
        return "INTERVAL " + std::to_string(t.minutes) + " MINUTE";
      case TermKind::Now:
        return "NOW()";
      case TermKind::Logic:
        if (t.head == "not") return "(NOT " + term(t.args[0]) + ")";
        return "(" + joined(t.args, t.head == "and" ? " AND " : " OR ") + ")";
      case TermKind::Compare:
      case TermKind::Arith:
        return "(" + term(t.args[0]) + " " + t.head + " " + term(t.args[1]) + ")";
      case TermKind::Like:
        return "(" + term(t.args[0]) + " LIKE " + term(t.args[1]) + ")";
      case TermKind::In: {
        std::string out = "(" + term(t.args[0]) + " IN (";
        for (std::size_t i = 1; i < t.args.size(); ++i) {
          if (i > 1) out += ", ";
          out += term(t.args[i]);
        }
        return out + "))";
      }
      case TermKind::Between:
        return "(" + term(t.args[0]) + " BETWEEN " + term(t.args[1]) + " AND " + term(t.args[2]) + ")";
      case TermKind::IsNull:
        return "(" + term(t.args[0]) + " IS NULL)";
      case TermKind::Contains: {
        std::string shape;
        if (t.shape.inline_polygon()) {
          shape = "ST_GEOMFROMTEXT(" + sql_quote(to_wkt(make_polygon(t.shape.polygon))) + ")";
        } else {
          shape = "(SELECT geometry FROM shp_data WHERE name = " + sql_quote(t.shape.name) + ")";
        }
        return "ST_CONTAINS(" + shape + ", POINT(" + term(t.args[0]) + ", " + term(t.args[1]) + "))";
      }
      case TermKind::Call:
        return to_upper(t.head) + "(" + joined(t.args, ", ") + ")";
    }
    return "NULL";
  }

  std::string conj(const std::vector<const Term*>& preds) const {
    std::string out;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (i) out += " AND ";
      out += "(" + term(*preds[i]) + ")";
    }
    return out;
  }

 private:
  std::string joined(const std::vector<Term>& args, const char* sep) const {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += sep;
      out += term(args[i]);
    }
    return out;
  }

  std::set<std::string> ambiguous_;
};

}  // namespace

std::string compile(const SairExpr& e, const SchemaRegistry& schema) {
  Flat flat;
  flatten(e, flat);

  std::set<std::string> seen, ambiguous;
  for (const auto& s : flat.sources) {
    const TableDef* def = schema.find(s.table);
    if (!def) continue;
    for (const auto& c : def->columns) {
      if (!seen.insert(to_lower(c.name)).second) ambiguous.insert(to_lower(c.name));
    }
  }
  const SqlWriter w(std::move(ambiguous));

  std::string sql = "SELECT ";
  for (std::size_t i = 0; i < e.columns.size(); ++i) {
    if (i) sql += ", ";
    sql += w.term(e.columns[i]);
  }
  auto table = [](const Source& s) { return s.alias.empty() ? s.table : s.table + " " + s.alias; };
  sql += " FROM " + table(flat.sources.front());
  for (std::size_t i = 1; i < flat.sources.size(); ++i) {
    const Source& s = flat.sources[i];
    sql += " JOIN " + table(s) + " ON " + (s.on.empty() ? std::string("1 = 1") : w.conj(s.on));
  }
  if (!flat.where.empty()) sql += " WHERE " + w.conj(flat.where);
  // Round-trip through the SQL printer for minimal, canonical parentheses.
  return sql::to_sql(sql::parse_sql(sql));
}

std::string compile_predicate(const Term& pred) {
  const SqlWriter w({});
  const auto ast = sql::parse_sql("SELECT mmsi FROM ship_ais WHERE " + w.term(pred));
  return sql::to_sql(*ast.where);
}

}  // namespace vtsql::sair
