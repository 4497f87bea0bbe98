#include "vtsql/sql/executor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "vtsql/error.hpp"
#include "vtsql/sql/geo.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sql {
namespace {

[[noreturn]] void runtime_error(const std::string& message, const Expr& at) {
  Error err(Errc::RuntimeError, message + " at position " + std::to_string(at.pos));
  err.at(at.pos);
  if (at.kind == ExprKind::Column || at.kind == ExprKind::Function) err.with_token(at.name);
  throw err;
}

bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

std::optional<double> text_as_number(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return d;
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "NULL";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "text";
    case 4: return "timestamp";
    default: return "geometry";
  }
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

struct Mismatch {};

int compare_non_null(const Value& a, const Value& b) {
  if (is_numeric(a) && is_numeric(b)) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
      return three_way(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    }
    return three_way(as_double(a), as_double(b));
  }
  const auto* sa = std::get_if<std::string>(&a);
  const auto* sb = std::get_if<std::string>(&b);
  if (sa && sb) return three_way(to_lower(*sa), to_lower(*sb));
  const auto* ta = std::get_if<Timestamp>(&a);
  const auto* tb = std::get_if<Timestamp>(&b);
  if (ta && tb) return three_way(*ta, *tb);
  if (ta && sb) {
    if (auto parsed = parse_timestamp(*sb)) return three_way(*ta, *parsed);
  }
  if (sa && tb) {
    if (auto parsed = parse_timestamp(*sa)) return three_way(*parsed, *tb);
  }
  if (is_numeric(a) && sb) {
    if (auto d = text_as_number(*sb)) return three_way(as_double(a), *d);
  }
  if (sa && is_numeric(b)) {
    if (auto d = text_as_number(*sa)) return three_way(*d, as_double(b));
  }
  throw Mismatch{};
}

Value boolean(bool b) { return std::int64_t{b ? 1 : 0}; }

bool like_match(std::string_view text, std::string_view pattern) {
  // Iterative wildcard matching with backtracking on the last '%'.
  std::size_t t = 0, p = 0, star_p = std::string_view::npos, star_t = 0;
  auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '\\' && p + 1 < pattern.size()) {
      if (lower(pattern[p + 1]) == lower(text[t])) {
        p += 2;
        ++t;
        continue;
      }
    } else if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_t = t;
      continue;
    } else if (p < pattern.size() && (pattern[p] == '_' || lower(pattern[p]) == lower(text[t]))) {
      ++p;
      ++t;
      continue;
    }
    if (star_p == std::string_view::npos) return false;
    p = star_p + 1;
    t = ++star_t;
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

const Geometry& as_geometry(const Value& v, const Expr& at) {
  const auto* g = std::get_if<GeometryPtr>(&v);
  if (!g || !*g) runtime_error(std::string("expected geometry, got ") + type_name(v), at);
  return **g;
}

LatLon as_point(const Value& v, const Expr& at) {
  const Geometry& g = as_geometry(v, at);
  if (g.kind != ShapeKind::Point) runtime_error("expected a POINT geometry", at);
  return g.vertices.front();
}

Value eval_function(const Expr& e, const Tuple& tuple, EvalContext& ctx) {
  if (e.name == "NOW") return ctx.now();
  std::vector<Value> args;
  args.reserve(e.args.size());
  for (const auto& a : e.args) args.push_back(evaluate(*a, tuple, ctx));
  for (const auto& a : args) {
    if (is_null(a)) return Value{};
  }
  if (e.name == "POINT") {
    if (!is_numeric(args[0]) || !is_numeric(args[1])) {
      runtime_error("POINT expects numeric (lat, lon)", e);
    }
    const LatLon p{as_double(args[0]), as_double(args[1])};
    try {
      return std::make_shared<const Geometry>(make_point(p));
    } catch (const Error&) {
      runtime_error("POINT coordinates out of range", e);
    }
  }
  if (e.name == "ST_GEOMFROMTEXT") {
    const auto* s = std::get_if<std::string>(&args[0]);
    if (!s) runtime_error("ST_GEOMFROMTEXT expects WKT text", e);
    try {
      return std::make_shared<const Geometry>(parse_wkt(*s));
    } catch (const Error& err) {
      runtime_error(err.what(), e);
    }
  }
  if (e.name == "ST_CONTAINS") {
    const Geometry& poly = as_geometry(args[0], *e.args[0]);
    const LatLon p = as_point(args[1], *e.args[1]);
    if (poly.kind != ShapeKind::Polygon) {
      Error err(Errc::NotAPolygon, "ST_CONTAINS first argument is not a polygon at position " +
                                       std::to_string(e.pos));
      err.at(e.pos).with_token("ST_CONTAINS");
      throw err;
    }
    return boolean(st_contains(poly, p));
  }
  if (e.name == "ST_DISTANCE") {
    return st_distance(as_point(args[0], *e.args[0]), as_point(args[1], *e.args[1]));
  }
  if (e.name == "SOUNDS_LIKE") {
    return boolean(sounds_like(display_value(args[0]), display_value(args[1])));
  }
  if (e.name == "LOWER" || e.name == "UPPER") {
    const std::string s = display_value(args[0]);
    return e.name == "LOWER" ? to_lower(s) : to_upper(s);
  }
  if (e.name == "ABS") {
    if (const auto* i = std::get_if<std::int64_t>(&args[0])) return *i < 0 ? -*i : *i;
    if (const auto* d = std::get_if<double>(&args[0])) return std::fabs(*d);
    runtime_error("ABS expects a number", e);
  }
  runtime_error("unknown function " + e.name, e);
}

Value eval_arith(const Expr& e, const Tuple& tuple, EvalContext& ctx) {
  const Expr& lhs_e = *e.args[0];
  const Expr& rhs_e = *e.args[1];
  if (rhs_e.kind == ExprKind::Interval || lhs_e.kind == ExprKind::Interval) {
    const Expr& ts_e = rhs_e.kind == ExprKind::Interval ? lhs_e : rhs_e;
    const Expr& iv_e = rhs_e.kind == ExprKind::Interval ? rhs_e : lhs_e;
    const Value base = evaluate(ts_e, tuple, ctx);
    if (is_null(base)) return Value{};
    Timestamp ts;
    if (const auto* t = std::get_if<Timestamp>(&base)) {
      ts = *t;
    } else if (const auto* s = std::get_if<std::string>(&base); s && parse_timestamp(*s)) {
      ts = *parse_timestamp(*s);
    } else {
      runtime_error(std::string("interval arithmetic needs a timestamp, got ") + type_name(base), e);
    }
    const std::int64_t delta = e.op == Op::Sub ? -iv_e.interval_seconds : iv_e.interval_seconds;
    return Timestamp{ts.seconds + delta};
  }
  const Value a = evaluate(lhs_e, tuple, ctx);
  const Value b = evaluate(rhs_e, tuple, ctx);
  if (is_null(a) || is_null(b)) return Value{};
  if (!is_numeric(a) || !is_numeric(b)) {
    runtime_error(std::string("arithmetic on ") + type_name(a) + " and " + type_name(b), e);
  }
  const bool ints = std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
  switch (e.op) {
    case Op::Add:
      if (ints) return std::get<std::int64_t>(a) + std::get<std::int64_t>(b);
      return as_double(a) + as_double(b);
    case Op::Sub:
      if (ints) return std::get<std::int64_t>(a) - std::get<std::int64_t>(b);
      return as_double(a) - as_double(b);
    case Op::Mul:
      if (ints) return std::get<std::int64_t>(a) * std::get<std::int64_t>(b);
      return as_double(a) * as_double(b);
    case Op::Div:
      if (as_double(b) == 0.0) return Value{};
      return as_double(a) / as_double(b);
    default:
      break;
  }
  runtime_error("bad arithmetic operator", e);
}

std::optional<int> compare_at(const Value& a, const Value& b, const Expr& at) {
  try {
    return compare_values(a, b);
  } catch (const Mismatch&) {
    runtime_error(std::string("type mismatch comparing ") + type_name(a) + " with " +
                      type_name(b),
                  at);
  }
}

// ------------------------------------------------------------ planning

void flatten_and(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == ExprKind::Binary && e.op == Op::And) {
    flatten_and(*e.args[0], out);
    flatten_and(*e.args[1], out);
  } else {
    out.push_back(&e);
  }
}

void collect_sources(const Expr& e, std::set<int>& out) {
  if (e.kind == ExprKind::Column) out.insert(e.source);
  for (const auto& a : e.args) collect_sources(*a, out);
}

struct Conjunct {
  const Expr* expr;
  std::set<int> sources;
  bool used = false;
};

enum class KeyClass { Numeric, Text, Time, None };

KeyClass key_class(ColumnKind k) {
  switch (k) {
    case ColumnKind::Integer:
    case ColumnKind::Real: return KeyClass::Numeric;
    case ColumnKind::Text: return KeyClass::Text;
    case ColumnKind::Timestamp: return KeyClass::Time;
    default: return KeyClass::None;
  }
}

std::optional<std::string> hash_key(const Value& v) {
  if (is_null(v)) return std::nullopt;
  if (is_numeric(v)) return format_number(as_double(v));
  if (const auto* s = std::get_if<std::string>(&v)) return to_lower(*s);
  if (const auto* t = std::get_if<Timestamp>(&v)) return std::to_string(t->seconds);
  return std::nullopt;
}

bool passes(const Expr& pred, const Tuple& tuple, EvalContext& ctx) {
  return truth_value(evaluate(pred, tuple, ctx)).value_or(false);
}

std::string item_name(const SelectItem& item) {
  if (!item.alias.empty()) return item.alias;
  if (item.expr->kind == ExprKind::Column) return item.expr->name;
  return to_sql(*item.expr);
}

void collect_shapes(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Subquery) {
    const SelectStmt& s = *e.subquery;
    if (iequals(s.from.table, "shp_data") && s.joins.empty() && s.where &&
        s.where->kind == ExprKind::Binary && s.where->op == Op::Eq) {
      const Expr& l = *s.where->args[0];
      const Expr& r = *s.where->args[1];
      const Expr* lit = nullptr;
      if (l.kind == ExprKind::Column && iequals(l.name, "name") && r.kind == ExprKind::Literal) lit = &r;
      if (r.kind == ExprKind::Column && iequals(r.name, "name") && l.kind == ExprKind::Literal) lit = &l;
      if (lit) {
        if (const auto* str = std::get_if<std::string>(&lit->literal)) {
          if (std::find(out.begin(), out.end(), *str) == out.end()) out.push_back(*str);
        }
      }
    }
    return;
  }
  for (const auto& a : e.args) collect_shapes(*a, out);
}

}  // namespace

const Value& EvalContext::scalar_subquery(const Expr& e) {
  auto it = subquery_cache_.find(&e);
  if (it != subquery_cache_.end()) return it->second;
  ExecOptions opts;
  opts.now = now_;
  const ResultSet rs = execute(*e.subquery, snapshot_, opts);
  if (rs.size() > 1) runtime_error("scalar subquery returned more than one row", e);
  Value v = rs.empty() ? Value{} : rs.rows().front().front();
  return subquery_cache_.emplace(&e, std::move(v)).first->second;
}

std::optional<int> compare_values(const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return std::nullopt;
  return compare_non_null(a, b);
}

std::optional<bool> truth_value(const Value& v) {
  if (is_null(v)) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
  if (const auto* d = std::get_if<double>(&v)) return *d != 0.0;
  throw Error(Errc::RuntimeError,
              std::string("expected a boolean condition, got ") + type_name(v));
}

Value evaluate(const Expr& e, const Tuple& tuple, EvalContext& ctx) {
  switch (e.kind) {
    case ExprKind::Literal:
      return e.literal;
    case ExprKind::Column: {
      if (e.source < 0 || static_cast<std::size_t>(e.source) >= tuple.size() ||
          !tuple[static_cast<std::size_t>(e.source)]) {
        runtime_error("unbound column " + e.name, e);
      }
      return (*tuple[static_cast<std::size_t>(e.source)])[static_cast<std::size_t>(e.column)];
    }
    case ExprKind::Interval:
      runtime_error("INTERVAL outside of timestamp arithmetic", e);
    case ExprKind::Subquery:
      return ctx.scalar_subquery(e);
    case ExprKind::Function:
      return eval_function(e, tuple, ctx);
    case ExprKind::Unary: {
      const Value v = evaluate(*e.args[0], tuple, ctx);
      if (is_null(v)) return Value{};
      if (e.op == Op::Not) {
        try {
          return boolean(!*truth_value(v));
        } catch (const Error&) {
          runtime_error(std::string("NOT applied to ") + type_name(v), e);
        }
      }
      if (const auto* i = std::get_if<std::int64_t>(&v)) return -*i;
      if (const auto* d = std::get_if<double>(&v)) return -*d;
      runtime_error(std::string("unary minus on ") + type_name(v), e);
    }
    case ExprKind::Binary: {
      switch (e.op) {
        case Op::And: {
          std::optional<bool> l;
          try {
            l = truth_value(evaluate(*e.args[0], tuple, ctx));
          } catch (const Error& err) {
            if (err.code() != Errc::RuntimeError || err.position() != Error::npos) throw;
            runtime_error(err.what(), *e.args[0]);
          }
          if (l == false) return boolean(false);
          const auto r = truth_value(evaluate(*e.args[1], tuple, ctx));
          if (r == false) return boolean(false);
          if (!l || !r) return Value{};
          return boolean(true);
        }
        case Op::Or: {
          const auto l = truth_value(evaluate(*e.args[0], tuple, ctx));
          if (l == true) return boolean(true);
          const auto r = truth_value(evaluate(*e.args[1], tuple, ctx));
          if (r == true) return boolean(true);
          if (!l || !r) return Value{};
          return boolean(false);
        }
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
          return eval_arith(e, tuple, ctx);
        default: {
          const auto c = compare_at(evaluate(*e.args[0], tuple, ctx),
                                    evaluate(*e.args[1], tuple, ctx), e);
          if (!c) return Value{};
          switch (e.op) {
            case Op::Eq: return boolean(*c == 0);
            case Op::Ne: return boolean(*c != 0);
            case Op::Lt: return boolean(*c < 0);
            case Op::Le: return boolean(*c <= 0);
            case Op::Gt: return boolean(*c > 0);
            case Op::Ge: return boolean(*c >= 0);
            default: break;
          }
          runtime_error("bad comparison operator", e);
        }
      }
    }
    case ExprKind::Like: {
      const Value a = evaluate(*e.args[0], tuple, ctx);
      const Value p = evaluate(*e.args[1], tuple, ctx);
      if (is_null(a) || is_null(p)) return Value{};
      const bool m = like_match(display_value(a), display_value(p));
      return boolean(m != e.negated);
    }
    case ExprKind::In: {
      const Value a = evaluate(*e.args[0], tuple, ctx);
      if (is_null(a)) return Value{};
      bool saw_null = false;
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        const auto c = compare_at(a, evaluate(*e.args[i], tuple, ctx), e);
        if (!c) {
          saw_null = true;
        } else if (*c == 0) {
          return boolean(!e.negated);
        }
      }
      if (saw_null) return Value{};
      return boolean(e.negated);
    }
    case ExprKind::Between: {
      const Value a = evaluate(*e.args[0], tuple, ctx);
      const auto lo = compare_at(a, evaluate(*e.args[1], tuple, ctx), e);
      const auto hi = compare_at(a, evaluate(*e.args[2], tuple, ctx), e);
      if (!lo || !hi) return Value{};
      const bool in = *lo >= 0 && *hi <= 0;
      return boolean(in != e.negated);
    }
    case ExprKind::IsNull: {
      const bool null = is_null(evaluate(*e.args[0], tuple, ctx));
      return boolean(null != e.negated);
    }
  }
  runtime_error("unsupported expression", e);
}

std::vector<std::string> output_columns(const SqlAst& ast) {
  std::vector<std::string> cols;
  for (const auto& item : ast.items) {
    if (!item.star) {
      cols.push_back(item_name(item));
      continue;
    }
    for (std::size_t s = 0; s < ast.source_count(); ++s) {
      const TableRef& ref = ast.source(s);
      if (!item.star_qualifier.empty() && !iequals(ref.visible_name(), item.star_qualifier)) continue;
      for (const auto& c : ref.def->columns) cols.push_back(c.name);
    }
  }
  return cols;
}

ResultSet execute(const SqlAst& ast, const Snapshot& snapshot, const ExecOptions& options) {
  if (!ast.resolved) throw Error(Errc::SchemaError, "statement has not been resolved");
  EvalContext ctx(snapshot, options.now);
  const std::size_t n = ast.source_count();

  std::vector<Conjunct> conjuncts;
  {
    std::vector<const Expr*> flat;
    if (ast.where) flatten_and(*ast.where, flat);
    for (const auto& j : ast.joins) flatten_and(*j.on, flat);
    for (const Expr* c : flat) {
      Conjunct cj{c, {}};
      collect_sources(*c, cj.sources);
      conjuncts.push_back(std::move(cj));
    }
  }

  const Tuple empty_tuple(n, nullptr);
  for (auto& c : conjuncts) {
    if (!c.sources.empty()) continue;
    c.used = true;
    if (!passes(*c.expr, empty_tuple, ctx)) {
      return ResultSet(output_columns(ast));
    }
  }

  // Per-source candidate rows after single-source predicates.
  std::vector<std::vector<const Row*>> base(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Table& t = snapshot.table(ast.source(s).table);
    std::vector<const Conjunct*> local;
    for (auto& c : conjuncts) {
      if (!c.used && c.sources.size() == 1 && *c.sources.begin() == static_cast<int>(s)) {
        c.used = true;
        local.push_back(&c);
      }
    }
    Tuple probe(n, nullptr);
    for (const Row& row : t.rows) {
      probe[s] = &row;
      const bool keep = std::all_of(local.begin(), local.end(), [&](const Conjunct* c) {
        return passes(*c->expr, probe, ctx);
      });
      if (keep) base[s].push_back(&row);
    }
  }

  std::vector<Tuple> tuples;
  for (const Row* r : base[0]) {
    Tuple t(n, nullptr);
    t[0] = r;
    tuples.push_back(std::move(t));
  }

  for (std::size_t s = 1; s < n && !tuples.empty(); ++s) {
    // Pick one equality between a column of the new source and a column of
    // an already joined source to drive a hash join.
    const Conjunct* equi = nullptr;
    const Expr* new_side = nullptr;
    const Expr* old_side = nullptr;
    for (auto& c : conjuncts) {
      if (c.used || c.sources.count(static_cast<int>(s)) == 0 ||
          *c.sources.rbegin() != static_cast<int>(s)) {
        continue;
      }
      const Expr& e = *c.expr;
      if (e.kind != ExprKind::Binary || e.op != Op::Eq) continue;
      const Expr& l = *e.args[0];
      const Expr& r = *e.args[1];
      if (l.kind != ExprKind::Column || r.kind != ExprKind::Column) continue;
      const Expr* nw = l.source == static_cast<int>(s) ? &l : (r.source == static_cast<int>(s) ? &r : nullptr);
      const Expr* od = nw == &l ? &r : &l;
      if (!nw || od->source >= static_cast<int>(s)) continue;
      if (key_class(nw->column_kind) != key_class(od->column_kind) ||
          key_class(nw->column_kind) == KeyClass::None) {
        continue;
      }
      equi = &c;
      new_side = nw;
      old_side = od;
      break;
    }
    std::vector<const Conjunct*> residual;
    for (auto& c : conjuncts) {
      if (c.used || &c == equi) continue;
      if (*c.sources.rbegin() == static_cast<int>(s)) {
        c.used = true;
        residual.push_back(&c);
      }
    }
    std::vector<Tuple> next;
    auto emit = [&](Tuple t) {
      for (const Conjunct* c : residual) {
        if (!passes(*c->expr, t, ctx)) return;
      }
      next.push_back(std::move(t));
    };
    if (equi) {
      const_cast<Conjunct*>(equi)->used = true;
      std::unordered_map<std::string, std::vector<const Row*>> index;
      for (const Row* r : base[s]) {
        const auto key = hash_key((*r)[static_cast<std::size_t>(new_side->column)]);
        if (key) index[*key].push_back(r);
      }
      for (const Tuple& left : tuples) {
        const auto key = hash_key(evaluate(*old_side, left, ctx));
        if (!key) continue;
        const auto it = index.find(*key);
        if (it == index.end()) continue;
        for (const Row* r : it->second) {
          Tuple t = left;
          t[s] = r;
          emit(std::move(t));
        }
      }
    } else {
      for (const Tuple& left : tuples) {
        for (const Row* r : base[s]) {
          Tuple t = left;
          t[s] = r;
          emit(std::move(t));
        }
      }
    }
    tuples = std::move(next);
  }

  // Projection.
  ResultSet out(output_columns(ast));
  struct Projected {
    Row row;
    std::vector<Value> keys;
  };
  std::vector<Projected> projected;
  projected.reserve(tuples.size());
  for (const Tuple& t : tuples) {
    Projected p;
    for (const auto& item : ast.items) {
      if (!item.star) {
        p.row.push_back(evaluate(*item.expr, t, ctx));
        continue;
      }
      for (std::size_t s = 0; s < n; ++s) {
        const TableRef& ref = ast.source(s);
        if (!item.star_qualifier.empty() && !iequals(ref.visible_name(), item.star_qualifier)) continue;
        for (const Value& v : *t[s]) p.row.push_back(v);
      }
    }
    for (const auto& o : ast.order_by) p.keys.push_back(evaluate(*o.expr, t, ctx));
    projected.push_back(std::move(p));
  }
  if (!ast.order_by.empty()) {
    std::stable_sort(projected.begin(), projected.end(), [&](const Projected& a, const Projected& b) {
      for (std::size_t k = 0; k < ast.order_by.size(); ++k) {
        const Value& x = a.keys[k];
        const Value& y = b.keys[k];
        int c = 0;
        if (is_null(x) || is_null(y)) {
          c = is_null(x) == is_null(y) ? 0 : (is_null(x) ? -1 : 1);
        } else {
          c = *compare_at(x, y, *ast.order_by[k].expr);
        }
        if (ast.order_by[k].descending) c = -c;
        if (c != 0) return c < 0;
      }
      return false;
    });
  }
  std::optional<std::size_t> cap;
  if (ast.limit) cap = static_cast<std::size_t>(*ast.limit);
  if (options.row_limit) cap = cap ? std::min(*cap, *options.row_limit) : *options.row_limit;
  for (auto& p : projected) {
    if (cap && out.size() >= *cap) break;
    out.add_row(std::move(p.row));
  }
  return out;
}

ResultSet execute_sql(std::string_view text, const Snapshot& snapshot, const ExecOptions& options) {
  const SqlAst ast = prepare(text);
  return execute(ast, snapshot, options);
}

std::vector<std::string> referenced_shapes(const SqlAst& ast) {
  std::vector<std::string> out;
  for (const auto& item : ast.items) {
    if (item.expr) collect_shapes(*item.expr, out);
  }
  for (const auto& j : ast.joins) collect_shapes(*j.on, out);
  if (ast.where) collect_shapes(*ast.where, out);
  return out;
}

}  // namespace vtsql::sql
