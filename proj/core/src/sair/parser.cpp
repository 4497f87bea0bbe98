#include <algorithm>
#include <cctype>
#include <charconv>

#include "vtsql/error.hpp"
#include "vtsql/sair/sair.hpp"
#include "vtsql/sql/parser.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sair {
namespace {

struct SExp {
  enum class Kind { List, Symbol, String, Number } kind = Kind::Symbol;
  std::string text;
  std::vector<SExp> items;
  std::size_t pos = 0;
};

[[noreturn]] void syntax(const std::string& message, std::size_t pos, std::string token = {}) {
  Error err(Errc::SairSyntaxError, message + " at position " + std::to_string(pos));
  err.at(pos);
  if (!token.empty()) err.with_token(std::move(token));
  throw err;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExp read_all() {
    skip_ws();
    if (i_ >= text_.size()) syntax("empty SAIR expression", 0);
    SExp e = read();
    skip_ws();
    if (i_ < text_.size()) syntax("trailing input after expression", i_, std::string(1, text_[i_]));
    return e;
  }

 private:
  void skip_ws() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }

  static bool symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '*' ||
           c == '=' || c == '<' || c == '>' || c == '+' || c == '-' || c == '/';
  }

  SExp read() {
    skip_ws();
    if (i_ >= text_.size()) syntax("unexpected end of input", i_);
    const std::size_t start = i_;
    const char c = text_[i_];
    if (c == '(') {
      ++i_;
      SExp list{SExp::Kind::List, {}, {}, start};
      for (;;) {
        skip_ws();
        if (i_ >= text_.size()) syntax("unbalanced '('", start, "(");
        if (text_[i_] == ')') {
          ++i_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') syntax("unexpected ')'", start, ")");
    if (c == '\'') {
      ++i_;
      std::string s;
      for (;;) {
        if (i_ >= text_.size()) syntax("unterminated string", start, "'");
        if (text_[i_] == '\'') {
          if (i_ + 1 < text_.size() && text_[i_ + 1] == '\'') {
            s += '\'';
            i_ += 2;
            continue;
          }
          ++i_;
          break;
        }
        s += text_[i_++];
      }
      return SExp{SExp::Kind::String, std::move(s), {}, start};
    }
    const bool number = std::isdigit(static_cast<unsigned char>(c)) ||
                        ((c == '-' || c == '.') && i_ + 1 < text_.size() &&
                         std::isdigit(static_cast<unsigned char>(text_[i_ + 1])));
    while (i_ < text_.size() && (symbol_char(text_[i_]) ||
                                 (number && (text_[i_] == 'e' || text_[i_] == 'E')))) {
      ++i_;
    }
    if (i_ == start) syntax("unexpected character", start, std::string(1, c));
    std::string tok(text_.substr(start, i_ - start));
    return SExp{number ? SExp::Kind::Number : SExp::Kind::Symbol, std::move(tok), {}, start};
  }

  std::string_view text_;
  std::size_t i_ = 0;
};

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

const char* const kCompare[] = {"=", "<>", "<", ">", "<=", ">="};
const char* const kArith[] = {"+", "-", "*", "/"};

template <std::size_t N>
bool one_of(const std::string& s, const char* const (&set)[N]) {
  return std::any_of(std::begin(set), std::end(set), [&](const char* x) { return s == x; });
}

double parse_double(const SExp& e) {
  if (e.kind != SExp::Kind::Number) syntax("expected a number", e.pos, e.text);
  double d = 0;
  const auto [ptr, ec] = std::from_chars(e.text.data(), e.text.data() + e.text.size(), d);
  if (ec != std::errc() || ptr != e.text.data() + e.text.size()) syntax("malformed number", e.pos, e.text);
  return d;
}

Term number_literal(const SExp& e) {
  Term t;
  t.kind = TermKind::Literal;
  t.pos = e.pos;
  if (e.text.find_first_of(".eE") == std::string::npos) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(e.text.data(), e.text.data() + e.text.size(), v);
    if (ec != std::errc() || ptr != e.text.data() + e.text.size()) {
      syntax("malformed integer", e.pos, e.text);
    }
    t.literal = v;
  } else {
    t.literal = parse_double(e);
  }
  return t;
}

Term parse_term(const SExp& e, bool interval_ok = false);

Term column_term(const SExp& e) {
  Term t;
  t.kind = TermKind::Column;
  t.pos = e.pos;
  const auto dot = e.text.find('.');
  if (dot == std::string::npos) {
    t.name = e.text;
  } else {
    t.qualifier = e.text.substr(0, dot);
    t.name = e.text.substr(dot + 1);
    if (!valid_identifier(t.qualifier)) syntax("malformed column reference", e.pos, e.text);
  }
  if (!valid_identifier(t.name)) syntax("malformed column reference", e.pos, e.text);
  return t;
}

std::vector<Term> parse_args(const SExp& e, bool interval_ok) {
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_term(e.items[i], interval_ok));
  return args;
}

void expect_arity(const SExp& e, const std::string& head, std::size_t min, std::size_t max) {
  const std::size_t n = e.items.size() - 1;
  if (n < min || n > max) {
    std::string want = min == max ? std::to_string(min) : std::to_string(min) + "+";
    syntax("'" + head + "' expects " + want + " argument(s), got " + std::to_string(n), e.pos, head);
  }
}

Term parse_contains(const SExp& e) {
  expect_arity(e, "st_contains", 2, 2);
  Term t;
  t.kind = TermKind::Contains;
  t.head = "st_contains";
  t.pos = e.pos;
  const SExp& shape = e.items[1];
  if (shape.kind != SExp::Kind::List || shape.items.empty() ||
      shape.items[0].kind != SExp::Kind::Symbol) {
    syntax("st_contains expects (shape 'name') or (polygon ...)", shape.pos);
  }
  const std::string sh = to_lower(shape.items[0].text);
  if (sh == "shape") {
    if (shape.items.size() != 2 || shape.items[1].kind != SExp::Kind::String) {
      syntax("(shape ...) expects one quoted name", shape.pos, "shape");
    }
    t.shape.name = shape.items[1].text;
    if (t.shape.name.empty()) syntax("empty shape name", shape.pos, "shape");
  } else if (sh == "polygon") {
    for (std::size_t i = 1; i < shape.items.size(); ++i) {
      const SExp& v = shape.items[i];
      if (v.kind != SExp::Kind::List || v.items.size() != 2) {
        syntax("polygon vertices are (lat lon) pairs", v.pos);
      }
      t.shape.polygon.push_back({parse_double(v.items[0]), parse_double(v.items[1])});
    }
    try {
      make_polygon(t.shape.polygon);
    } catch (const Error& err) {
      syntax(std::string("invalid inline polygon: ") + err.what(), shape.pos, "polygon");
    }
  } else {
    syntax("st_contains expects (shape 'name') or (polygon ...)", shape.pos, shape.items[0].text);
  }
  const SExp& point = e.items[2];
  if (point.kind != SExp::Kind::List || point.items.size() != 2) {
    syntax("st_contains expects a (lat lon) point", point.pos);
  }
  t.args.push_back(parse_term(point.items[0]));
  t.args.push_back(parse_term(point.items[1]));
  return t;
}

Term parse_term(const SExp& e, bool interval_ok) {
  switch (e.kind) {
    case SExp::Kind::String: {
      Term t;
      t.kind = TermKind::Literal;
      t.literal = e.text;
      t.pos = e.pos;
      return t;
    }
    case SExp::Kind::Number:
      return number_literal(e);
    case SExp::Kind::Symbol:
      return column_term(e);
    case SExp::Kind::List:
      break;
  }
  if (e.items.empty()) syntax("empty list where a term was expected", e.pos, "()");
  if (e.items[0].kind != SExp::Kind::Symbol) syntax("expected an operator", e.items[0].pos, e.items[0].text);
  const std::string head = to_lower(e.items[0].text);
  Term t;
  t.head = head;
  t.pos = e.pos;
  if (head == "and" || head == "or") {
    expect_arity(e, head, 2, 1000);
    t.kind = TermKind::Logic;
    t.args = parse_args(e, false);
  } else if (head == "not") {
    expect_arity(e, head, 1, 1);
    t.kind = TermKind::Logic;
    t.args = parse_args(e, false);
  } else if (one_of(head, kCompare)) {
    expect_arity(e, head, 2, 2);
    t.kind = TermKind::Compare;
    t.args = parse_args(e, false);
  } else if (one_of(head, kArith)) {
    expect_arity(e, head, 2, 2);
    t.kind = TermKind::Arith;
    const bool additive = head == "+" || head == "-";
    t.args = parse_args(e, additive);
    const auto intervals = std::count_if(t.args.begin(), t.args.end(), [](const Term& a) {
      return a.kind == TermKind::Interval;
    });
    if (intervals > 1 || (head == "-" && t.args[0].kind == TermKind::Interval)) {
      syntax("(minutes n) needs a timestamp on the other side", e.pos, head);
    }
  } else if (head == "like") {
    expect_arity(e, head, 2, 2);
    t.kind = TermKind::Like;
    t.args = parse_args(e, false);
  } else if (head == "in") {
    expect_arity(e, head, 2, 1000);
    t.kind = TermKind::In;
    t.args = parse_args(e, false);
  } else if (head == "between") {
    expect_arity(e, head, 3, 3);
    t.kind = TermKind::Between;
    t.args = parse_args(e, false);
  } else if (head == "is_null") {
    expect_arity(e, head, 1, 1);
    t.kind = TermKind::IsNull;
    t.args = parse_args(e, false);
  } else if (head == "st_contains") {
    return parse_contains(e);
  } else if (head == "ts") {
    expect_arity(e, head, 1, 1);
    if (e.items[1].kind != SExp::Kind::String) syntax("(ts ...) expects a quoted timestamp", e.pos, "ts");
    const auto ts = parse_timestamp(e.items[1].text);
    if (!ts) syntax("malformed timestamp '" + e.items[1].text + "'", e.items[1].pos, e.items[1].text);
    t.kind = TermKind::Literal;
    t.head.clear();
    t.literal = *ts;
  } else if (head == "now") {
    expect_arity(e, head, 0, 0);
    t.kind = TermKind::Now;
    t.head.clear();
  } else if (head == "minutes") {
    expect_arity(e, head, 1, 1);
    if (!interval_ok) syntax("(minutes n) is only valid as an operand of + or -", e.pos, "minutes");
    const Term n = number_literal(e.items[1]);
    const auto* v = std::get_if<std::int64_t>(&n.literal);
    if (!v) syntax("(minutes n) expects an integer", e.items[1].pos, e.items[1].text);
    t.kind = TermKind::Interval;
    t.head.clear();
    t.minutes = *v;
  } else {
    const auto& fns = sql::sql_functions();
    const auto it = std::find_if(fns.begin(), fns.end(), [&](const sql::FunctionSig& f) {
      return iequals(f.name, head);
    });
    if (it == fns.end() || iequals(head, "now")) {
      syntax("unknown operator '" + e.items[0].text + "'", e.items[0].pos, e.items[0].text);
    }
    expect_arity(e, head, it->arity, it->arity);
    t.kind = TermKind::Call;
    t.args = parse_args(e, false);
  }
  return t;
}

Node parse_rel(const SExp& e);

Node parse_project(const SExp& e) {
  Node n;
  n.kind = NodeKind::Project;
  n.pos = e.pos;
  if (e.items.size() != 3) syntax("(project (columns...) relation) expects 2 arguments", e.pos, "project");
  const SExp& cols = e.items[1];
  if (cols.kind != SExp::Kind::List || cols.items.empty()) {
    syntax("project expects a non-empty column list", cols.pos, "project");
  }
  for (const auto& c : cols.items) {
    if (c.kind == SExp::Kind::Symbol && c.text == "*") {
      if (cols.items.size() != 1) syntax("'*' must be the only projected column", c.pos, "*");
      Term star;
      star.kind = TermKind::Column;
      star.name = "*";
      star.pos = c.pos;
      n.columns.push_back(std::move(star));
      continue;
    }
    n.columns.push_back(parse_term(c));
  }
  n.children.push_back(parse_rel(e.items[2]));
  return n;
}

Node parse_rel(const SExp& e) {
  if (e.kind != SExp::Kind::List || e.items.empty() || e.items[0].kind != SExp::Kind::Symbol) {
    syntax("expected a relation (rel/select/join)", e.pos, e.text);
  }
  const std::string head = to_lower(e.items[0].text);
  Node n;
  n.pos = e.pos;
  if (head == "rel") {
    if (e.items.size() < 2 || e.items.size() > 3) syntax("(rel table [alias]) malformed", e.pos, "rel");
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      if (e.items[i].kind != SExp::Kind::Symbol || !valid_identifier(e.items[i].text)) {
        syntax("expected an identifier", e.items[i].pos, e.items[i].text);
      }
    }
    n.kind = NodeKind::Rel;
    n.table = to_lower(e.items[1].text);
    if (e.items.size() == 3) n.alias = e.items[2].text;
    return n;
  }
  if (head == "select") {
    if (e.items.size() != 3) syntax("(select predicate relation) expects 2 arguments", e.pos, "select");
    n.kind = NodeKind::Select;
    n.pred = parse_term(e.items[1]);
    n.children.push_back(parse_rel(e.items[2]));
    return n;
  }
  if (head == "join") {
    if (e.items.size() != 4) syntax("(join condition left right) expects 3 arguments", e.pos, "join");
    n.kind = NodeKind::Join;
    n.pred = parse_term(e.items[1]);
    n.children.push_back(parse_rel(e.items[2]));
    n.children.push_back(parse_rel(e.items[3]));
    return n;
  }
  if (head == "project") syntax("project is only allowed at the root", e.pos, "project");
  syntax("unknown relational operator '" + e.items[0].text + "'", e.items[0].pos, e.items[0].text);
}

// ------------------------------------------------------------ resolution

struct Scope {
  std::string visible;
  const TableDef* def;
};

[[noreturn]] void schema_error(const std::string& message, std::size_t pos, std::string token,
                               std::string suggestion = {}) {
  std::string msg = message + " at position " + std::to_string(pos);
  if (!suggestion.empty()) msg += "; did you mean '" + suggestion + "'?";
  Error err(Errc::SairSchemaError, msg);
  err.at(pos).with_token(std::move(token));
  if (!suggestion.empty()) err.with_suggestion(std::move(suggestion));
  throw err;
}

class Resolver {
 public:
  explicit Resolver(const SchemaRegistry& schema) : schema_(schema) {}

  std::vector<Scope> resolve(Node& n) {
    switch (n.kind) {
      case NodeKind::Rel: {
        const TableDef* def = schema_.find(n.table);
        if (!def) schema_error("unknown table '" + n.table + "'", n.pos, n.table, schema_.suggest_table(n.table));
        return {Scope{n.alias.empty() ? n.table : n.alias, def}};
      }
      case NodeKind::Select: {
        auto scope = resolve(n.children[0]);
        term(*n.pred, scope);
        return scope;
      }
      case NodeKind::Join: {
        auto scope = resolve(n.children[0]);
        auto right = resolve(n.children[1]);
        for (const auto& r : right) {
          for (const auto& l : scope) {
            if (iequals(l.visible, r.visible)) {
              schema_error("relation name '" + r.visible + "' used twice; add an alias", n.pos, r.visible);
            }
          }
          scope.push_back(r);
        }
        term(*n.pred, scope);
        return scope;
      }
      case NodeKind::Project: {
        auto scope = resolve(n.children[0]);
        for (auto& c : n.columns) {
          if (c.kind == TermKind::Column && c.name == "*") continue;
          term(c, scope);
        }
        return scope;
      }
    }
    return {};
  }

 private:
  void term(Term& t, const std::vector<Scope>& scope) {
    for (auto& a : t.args) term(a, scope);
    if (t.kind != TermKind::Column) return;
    std::vector<const TableDef*> defs;
    for (const auto& s : scope) defs.push_back(s.def);
    if (!t.qualifier.empty()) {
      const auto it = std::find_if(scope.begin(), scope.end(), [&](const Scope& s) {
        return iequals(s.visible, t.qualifier);
      });
      if (it == scope.end()) schema_error("unknown relation '" + t.qualifier + "'", t.pos, t.qualifier);
      if (!it->def->column_index(t.name)) {
        schema_error("unknown column '" + t.name + "' in " + it->def->name, t.pos, t.name,
                     schema_.suggest_column(t.name, {it->def}));
      }
      t.binding = it->visible;
      return;
    }
    const Scope* hit = nullptr;
    for (const auto& s : scope) {
      if (!s.def->column_index(t.name)) continue;
      if (hit) {
        schema_error("ambiguous column '" + t.name + "' (in " + hit->visible + " and " + s.visible + ")",
                     t.pos, t.name);
      }
      hit = &s;
    }
    if (!hit) schema_error("unknown column '" + t.name + "'", t.pos, t.name, schema_.suggest_column(t.name, defs));
    t.binding = hit->visible;
  }

  const SchemaRegistry& schema_;
};

}  // namespace

SairExpr parse_sair(std::string_view text, const SchemaRegistry& schema) {
  Reader reader(text);
  const SExp root = reader.read_all();
  if (root.kind != SExp::Kind::List || root.items.empty() || root.items[0].kind != SExp::Kind::Symbol ||
      to_lower(root.items[0].text) != "project") {
    syntax("the root must be a (project ...) node", root.pos,
           root.items.empty() ? root.text : root.items[0].text);
  }
  Node n = parse_project(root);
  Resolver(schema).resolve(n);
  return n;
}

}  // namespace vtsql::sair
