#include "vtsql/sql/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "vtsql/error.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sql {
namespace {

enum class Tok { Ident, QuotedIdent, Number, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

const std::set<std::string, std::less<>> kReserved = {
    "SELECT", "FROM",  "WHERE", "JOIN",    "INNER",    "ON",        "AND",
    "OR",     "NOT",   "LIKE",  "IN",      "BETWEEN",  "IS",        "NULL",
    "ORDER",  "BY",    "ASC",   "DESC",    "LIMIT",    "AS",        "DISTINCT",
    "INTERVAL", "TIMESTAMP", "TRUE", "FALSE", "GROUP", "HAVING", "UNION", "LEFT",
    "RIGHT", "OUTER", "CROSS"};

[[noreturn]] void syntax_error(const std::string& message, const Token& at) {
  Error err(Errc::SyntaxError,
            message + " at position " + std::to_string(at.pos) +
                (at.kind == Tok::End ? " (end of input)" : " near '" + at.text + "'"));
  err.at(at.pos).with_token(at.kind == Tok::End ? std::string("<end>") : at.text);
  throw err;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(c) ||
               (c == '.' && i + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      const char quote = static_cast<char>(c);
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < s.size()) {
        if (s[j] == quote) {
          if (j + 1 < s.size() && s[j + 1] == quote) {
            value += quote;
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        value += s[j++];
      }
      if (!closed) {
        Token bad{Tok::String, std::string(s.substr(i)), i};
        syntax_error("unterminated string literal", bad);
      }
      t.kind = Tok::String;
      t.text = std::move(value);
      i = j;
    } else if (c == '`') {
      const auto close = s.find('`', i + 1);
      if (close == std::string_view::npos) {
        syntax_error("unterminated quoted identifier", Token{Tok::Symbol, "`", i});
      }
      t.kind = Tok::QuotedIdent;
      t.text = std::string(s.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      static const char* two[] = {"<=", ">=", "<>", "!="};
      t.kind = Tok::Symbol;
      bool matched = false;
      for (const char* op : two) {
        if (s.substr(i, 2) == op) {
          t.text = op;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(),.*=<>+-/;").find(static_cast<char>(c)) ==
            std::string_view::npos) {
          syntax_error("unexpected character", Token{Tok::Symbol, std::string(1, static_cast<char>(c)), i});
        }
        t.text = std::string(1, static_cast<char>(c));
        ++i;
      }
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  SelectStmt parse_statement() {
    SelectStmt stmt = parse_select();
    if (is_symbol(";")) advance();
    if (peek().kind != Tok::End) syntax_error("unexpected token after statement", peek());
    return stmt;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(idx_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[std::min(idx_++, tokens_.size() - 1)]; }

  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Ident && iequals(t.text, kw);
  }
  bool is_symbol(std::string_view sym) const {
    const Token& t = peek();
    return t.kind == Tok::Symbol && t.text == sym;
  }
  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    advance();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) syntax_error("expected " + std::string(kw), peek());
  }
  void expect_symbol(std::string_view sym) {
    if (!is_symbol(sym)) syntax_error("expected '" + std::string(sym) + "'", peek());
    advance();
  }
  bool is_reserved(const Token& t) const {
    return t.kind == Tok::Ident && kReserved.count(to_upper(t.text)) > 0;
  }

  std::string expect_identifier(const char* what) {
    const Token& t = peek();
    if (t.kind == Tok::QuotedIdent || (t.kind == Tok::Ident && !is_reserved(t))) {
      advance();
      return t.text;
    }
    syntax_error(std::string("expected ") + what, t);
  }

  SelectStmt parse_select() {
    SelectStmt stmt;
    expect_keyword("SELECT");
    if (accept_keyword("DISTINCT")) stmt.distinct = true;
    do {
      stmt.items.push_back(parse_select_item());
    } while (is_symbol(",") && (advance(), true));
    expect_keyword("FROM");
    stmt.from = parse_table_ref();
    while (true) {
      if (is_keyword("INNER") && is_keyword("JOIN", 1)) {
        advance();
      } else if (is_keyword("LEFT") || is_keyword("RIGHT") || is_keyword("CROSS") ||
                 is_keyword("OUTER")) {
        syntax_error("only inner JOIN is supported", peek());
      } else if (is_symbol(",")) {
        syntax_error("comma joins are not supported; use JOIN ... ON", peek());
      }
      if (!accept_keyword("JOIN")) break;
      JoinClause jc;
      jc.table = parse_table_ref();
      expect_keyword("ON");
      jc.on = parse_expr();
      stmt.joins.push_back(std::move(jc));
    }
    if (accept_keyword("WHERE")) stmt.where = parse_expr();
    if (is_keyword("GROUP") || is_keyword("HAVING")) {
      syntax_error("GROUP BY / HAVING are not supported", peek());
    }
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem item;
        item.expr = parse_expr();
        if (accept_keyword("DESC")) {
          item.descending = true;
        } else {
          accept_keyword("ASC");
        }
        stmt.order_by.push_back(std::move(item));
      } while (is_symbol(",") && (advance(), true));
    }
    if (accept_keyword("LIMIT")) {
      const Token& t = peek();
      std::int64_t n = 0;
      if (t.kind != Tok::Number ||
          std::from_chars(t.text.data(), t.text.data() + t.text.size(), n).ptr !=
              t.text.data() + t.text.size() ||
          n < 0) {
        syntax_error("expected non-negative integer after LIMIT", t);
      }
      advance();
      stmt.limit = n;
    }
    return stmt;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (is_symbol("*")) {
      advance();
      item.star = true;
      return item;
    }
    if ((peek().kind == Tok::Ident || peek().kind == Tok::QuotedIdent) &&
        peek(1).kind == Tok::Symbol && peek(1).text == "." &&
        peek(2).kind == Tok::Symbol && peek(2).text == "*") {
      item.star = true;
      item.star_qualifier = advance().text;
      advance();
      advance();
      return item;
    }
    item.expr = parse_expr();
    if (accept_keyword("AS")) {
      item.alias = expect_identifier("alias");
    } else if ((peek().kind == Tok::Ident && !is_reserved(peek())) ||
               peek().kind == Tok::QuotedIdent) {
      item.alias = advance().text;
    }
    return item;
  }

  TableRef parse_table_ref() {
    TableRef ref;
    ref.pos = peek().pos;
    ref.table = expect_identifier("table name");
    if (accept_keyword("AS")) {
      ref.alias = expect_identifier("table alias");
    } else if ((peek().kind == Tok::Ident && !is_reserved(peek())) ||
               peek().kind == Tok::QuotedIdent) {
      ref.alias = advance().text;
    }
    return ref;
  }

  ExprPtr make(ExprKind kind, std::size_t pos) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    return e;
  }

  ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs, std::size_t pos) {
    auto e = make(ExprKind::Binary, pos);
    e->op = op;
    e->args.push_back(std::move(lhs));
    e->args.push_back(std::move(rhs));
    return e;
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (is_keyword("OR")) {
      const std::size_t pos = advance().pos;
      lhs = binary(Op::Or, std::move(lhs), parse_and(), pos);
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (is_keyword("AND")) {
      const std::size_t pos = advance().pos;
      lhs = binary(Op::And, std::move(lhs), parse_not(), pos);
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (is_keyword("NOT")) {
      const std::size_t pos = advance().pos;
      auto e = make(ExprKind::Unary, pos);
      e->op = Op::Not;
      e->args.push_back(parse_not());
      return e;
    }
    return parse_predicate();
  }

  ExprPtr parse_predicate() {
    ExprPtr lhs = parse_additive();
    const Token& t = peek();
    if (t.kind == Tok::Symbol) {
      Op op{};
      bool cmp = true;
      if (t.text == "=") op = Op::Eq;
      else if (t.text == "<>" || t.text == "!=") op = Op::Ne;
      else if (t.text == "<") op = Op::Lt;
      else if (t.text == "<=") op = Op::Le;
      else if (t.text == ">") op = Op::Gt;
      else if (t.text == ">=") op = Op::Ge;
      else cmp = false;
      if (cmp) {
        const std::size_t pos = advance().pos;
        return binary(op, std::move(lhs), parse_additive(), pos);
      }
      return lhs;
    }
    bool negated = false;
    if (is_keyword("NOT") &&
        (is_keyword("LIKE", 1) || is_keyword("IN", 1) || is_keyword("BETWEEN", 1))) {
      advance();
      negated = true;
    }
    if (is_keyword("LIKE")) {
      auto e = make(ExprKind::Like, advance().pos);
      e->negated = negated;
      e->args.push_back(std::move(lhs));
      e->args.push_back(parse_additive());
      return e;
    }
    if (is_keyword("IN")) {
      auto e = make(ExprKind::In, advance().pos);
      e->negated = negated;
      e->args.push_back(std::move(lhs));
      expect_symbol("(");
      if (is_keyword("SELECT")) syntax_error("IN (subquery) is not supported", peek());
      do {
        e->args.push_back(parse_additive());
      } while (is_symbol(",") && (advance(), true));
      expect_symbol(")");
      return e;
    }
    if (is_keyword("BETWEEN")) {
      auto e = make(ExprKind::Between, advance().pos);
      e->negated = negated;
      e->args.push_back(std::move(lhs));
      e->args.push_back(parse_additive());
      expect_keyword("AND");
      e->args.push_back(parse_additive());
      return e;
    }
    if (is_keyword("IS")) {
      auto e = make(ExprKind::IsNull, advance().pos);
      if (accept_keyword("NOT")) e->negated = true;
      expect_keyword("NULL");
      e->args.push_back(std::move(lhs));
      return e;
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (is_symbol("+") || is_symbol("-")) {
      const Token& t = advance();
      lhs = binary(t.text == "+" ? Op::Add : Op::Sub, std::move(lhs),
                   parse_multiplicative(), t.pos);
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    while (is_symbol("*") || is_symbol("/")) {
      const Token& t = advance();
      lhs = binary(t.text == "*" ? Op::Mul : Op::Div, std::move(lhs), parse_unary(), t.pos);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_symbol("-")) {
      const std::size_t pos = advance().pos;
      if (peek().kind == Tok::Number) {
        ExprPtr lit = parse_primary();
        if (auto* i = std::get_if<std::int64_t>(&lit->literal)) *i = -*i;
        if (auto* d = std::get_if<double>(&lit->literal)) *d = -*d;
        lit->pos = pos;
        return lit;
      }
      auto e = make(ExprKind::Unary, pos);
      e->op = Op::Neg;
      e->args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        auto e = make(ExprKind::Literal, t.pos);
        const bool is_int = t.text.find_first_of(".eE") == std::string::npos;
        if (is_int) {
          std::int64_t v = 0;
          const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
          if (res.ec == std::errc()) {
            e->literal = v;
            return e;
          }
        }
        e->literal = std::stod(t.text);
        return e;
      }
      case Tok::String: {
        advance();
        auto e = make(ExprKind::Literal, t.pos);
        e->literal = t.text;
        return e;
      }
      case Tok::Symbol:
        if (t.text == "(") {
          advance();
          if (is_keyword("SELECT")) {
            auto e = make(ExprKind::Subquery, t.pos);
            e->subquery = std::make_unique<SelectStmt>(parse_select());
            expect_symbol(")");
            return e;
          }
          ExprPtr inner = parse_expr();
          expect_symbol(")");
          return inner;
        }
        syntax_error("expected expression", t);
      case Tok::End:
        syntax_error("expected expression", t);
      case Tok::Ident:
      case Tok::QuotedIdent:
        break;
    }
    if (t.kind == Tok::Ident) {
      const std::string upper = to_upper(t.text);
      if (upper == "NULL") {
        advance();
        return make(ExprKind::Literal, t.pos);
      }
      if (upper == "TRUE" || upper == "FALSE") {
        advance();
        auto e = make(ExprKind::Literal, t.pos);
        e->literal = std::int64_t{upper == "TRUE" ? 1 : 0};
        return e;
      }
      if (upper == "TIMESTAMP" && peek(1).kind == Tok::String) {
        advance();
        const Token& lit = advance();
        auto ts = parse_timestamp(lit.text);
        if (!ts) syntax_error("malformed timestamp literal", lit);
        auto e = make(ExprKind::Literal, t.pos);
        e->literal = *ts;
        return e;
      }
      if (upper == "INTERVAL") {
        advance();
        const Token& amount = peek();
        std::int64_t n = 0;
        if (amount.kind != Tok::Number ||
            std::from_chars(amount.text.data(), amount.text.data() + amount.text.size(), n)
                    .ptr != amount.text.data() + amount.text.size()) {
          syntax_error("expected integer interval amount", amount);
        }
        advance();
        const Token& unit = peek();
        const std::string u = to_upper(unit.text);
        std::int64_t scale = 0;
        std::string canonical;
        if (u == "SECOND" || u == "SECONDS") scale = 1, canonical = "SECOND";
        else if (u == "MINUTE" || u == "MINUTES") scale = 60, canonical = "MINUTE";
        else if (u == "HOUR" || u == "HOURS") scale = 3600, canonical = "HOUR";
        else if (u == "DAY" || u == "DAYS") scale = 86400, canonical = "DAY";
        if (unit.kind != Tok::Ident || scale == 0) {
          syntax_error("expected interval unit (SECOND, MINUTE, HOUR, DAY)", unit);
        }
        advance();
        auto e = make(ExprKind::Interval, t.pos);
        e->interval_amount = n;
        e->interval_unit = canonical;
        e->interval_seconds = n * scale;
        return e;
      }
      if (is_reserved(t)) syntax_error("unexpected keyword", t);
    }
    advance();
    if (is_symbol("(") && t.kind == Tok::Ident) {
      advance();
      auto e = make(ExprKind::Function, t.pos);
      e->name = to_upper(t.text);
      if (!is_symbol(")")) {
        do {
          e->args.push_back(parse_expr());
        } while (is_symbol(",") && (advance(), true));
      }
      expect_symbol(")");
      return e;
    }
    auto e = make(ExprKind::Column, t.pos);
    if (is_symbol(".")) {
      advance();
      e->qualifier = t.text;
      e->name = expect_identifier("column name");
    } else {
      e->name = t.text;
    }
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
};

// ---------------------------------------------------------------- resolve

class Resolver {
 public:
  explicit Resolver(const SchemaRegistry& schema) : schema_(schema) {}

  void resolve_select(SelectStmt& stmt) {
    std::vector<TableRef*> sources{&stmt.from};
    for (auto& j : stmt.joins) sources.push_back(&j.table);
    std::set<std::string> visible;
    for (auto* ref : sources) {
      const TableDef* def = schema_.find(ref->table);
      if (!def) {
        Error err(Errc::SchemaError, "unknown table " + ref->table);
        err.at(ref->pos).with_token(ref->table);
        if (auto s = schema_.suggest_table(ref->table); !s.empty()) err.with_suggestion(s);
        throw err;
      }
      ref->def = def;
      if (!visible.insert(to_lower(ref->visible_name())).second) {
        Error err(Errc::SchemaError,
                  "table name " + ref->visible_name() + " used twice; add an alias");
        err.at(ref->pos).with_token(ref->visible_name());
        throw err;
      }
    }
    std::vector<const TableRef*> scope(sources.begin(), sources.end());
    for (auto& item : stmt.items) {
      if (item.star) {
        if (!item.star_qualifier.empty()) find_source(scope, item.star_qualifier, 0);
        continue;
      }
      resolve_expr(*item.expr, scope);
    }
    for (std::size_t j = 0; j < stmt.joins.size(); ++j) {
      // ON may reference every table introduced so far.
      std::vector<const TableRef*> on_scope(scope.begin(), scope.begin() + static_cast<long>(j) + 2);
      resolve_expr(*stmt.joins[j].on, on_scope);
    }
    if (stmt.where) resolve_expr(*stmt.where, scope);
    for (auto& o : stmt.order_by) resolve_expr(*o.expr, scope);
    stmt.resolved = true;
  }

 private:
  int find_source(const std::vector<const TableRef*>& scope, const std::string& qualifier,
                  std::size_t pos) {
    for (std::size_t i = 0; i < scope.size(); ++i) {
      if (iequals(scope[i]->visible_name(), qualifier)) return static_cast<int>(i);
    }
    Error err(Errc::SchemaError, "unknown table or alias " + qualifier);
    err.at(pos).with_token(qualifier);
    throw err;
  }

  void resolve_column(Expr& e, const std::vector<const TableRef*>& scope) {
    std::vector<const TableDef*> defs;
    for (const auto* r : scope) defs.push_back(r->def);
    auto unknown = [&](const std::vector<const TableDef*>& where) {
      Error err(Errc::SchemaError, "unknown column " + e.name);
      err.at(e.pos).with_token(e.name);
      if (auto s = schema_.suggest_column(e.name, where); !s.empty()) {
        err.with_suggestion(s);
      }
      throw err;
    };
    if (!e.qualifier.empty()) {
      const int src = find_source(scope, e.qualifier, e.pos);
      const auto idx = scope[static_cast<std::size_t>(src)]->def->column_index(e.name);
      if (!idx) unknown({scope[static_cast<std::size_t>(src)]->def});
      bind(e, src, *idx, *scope[static_cast<std::size_t>(src)]->def);
      return;
    }
    int found = -1;
    std::size_t col = 0;
    for (std::size_t i = 0; i < scope.size(); ++i) {
      if (auto idx = scope[i]->def->column_index(e.name)) {
        if (found >= 0) {
          Error err(Errc::SchemaError,
                    "ambiguous column " + e.name + "; qualify it with a table name");
          err.at(e.pos).with_token(e.name);
          throw err;
        }
        found = static_cast<int>(i);
        col = *idx;
      }
    }
    if (found < 0) unknown(defs);
    bind(e, found, col, *scope[static_cast<std::size_t>(found)]->def);
  }

  static void bind(Expr& e, int src, std::size_t col, const TableDef& def) {
    e.source = src;
    e.column = static_cast<int>(col);
    e.column_kind = def.columns[col].kind;
    e.name = def.columns[col].name;
  }

  void resolve_expr(Expr& e, const std::vector<const TableRef*>& scope) {
    switch (e.kind) {
      case ExprKind::Column:
        resolve_column(e, scope);
        return;
      case ExprKind::Function: {
        const auto& fns = sql_functions();
        const auto it = std::find_if(fns.begin(), fns.end(),
                                     [&](const FunctionSig& f) { return f.name == e.name; });
        if (it == fns.end()) {
          Error err(Errc::SchemaError, "unknown function " + e.name);
          err.at(e.pos).with_token(e.name);
          if (e.name == "ST_WITHIN") err.with_suggestion("ST_CONTAINS");
          throw err;
        }
        if (e.args.size() != it->arity) {
          Error err(Errc::SchemaError, e.name + " takes " + std::to_string(it->arity) +
                                           " argument(s), got " +
                                           std::to_string(e.args.size()));
          err.at(e.pos).with_token(e.name);
          throw err;
        }
        break;
      }
      case ExprKind::Subquery: {
        Resolver inner(schema_);
        inner.resolve_select(*e.subquery);
        if (e.subquery->items.size() != 1 || e.subquery->items[0].star) {
          Error err(Errc::SchemaError, "scalar subquery must select exactly one column");
          err.at(e.pos).with_token("(SELECT");
          throw err;
        }
        return;
      }
      case ExprKind::Interval: {
        Error err(Errc::SyntaxError,
                  "INTERVAL is only valid as an operand of + or - at position " +
                      std::to_string(e.pos));
        err.at(e.pos).with_token("INTERVAL");
        throw err;
      }
      case ExprKind::Binary:
        if ((e.op == Op::Add || e.op == Op::Sub) && e.args[1]->kind == ExprKind::Interval) {
          resolve_expr(*e.args[0], scope);
          return;
        }
        if (e.op == Op::Add && e.args[0]->kind == ExprKind::Interval) {
          resolve_expr(*e.args[1], scope);
          return;
        }
        break;
      default:
        break;
    }
    for (auto& a : e.args) resolve_expr(*a, scope);
  }

  const SchemaRegistry& schema_;
};

// ---------------------------------------------------------------- printer

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge:
          return 4;
        case Op::Add: case Op::Sub: return 5;
        case Op::Mul: case Op::Div: return 6;
        default: return 8;
      }
    case ExprKind::Unary: return e.op == Op::Not ? 3 : 7;
    case ExprKind::Like: case ExprKind::In: case ExprKind::Between: case ExprKind::IsNull:
      return 4;
    default: return 8;
  }
}

void print(const Expr& e, int min_prec, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, 0, out);
    out += ')';
  } else {
    print(e, min_prec, out);
  }
}

void print_literal(const Value& v, std::string& out) {
  if (is_null(v)) {
    out += "NULL";
  } else if (const auto* s = std::get_if<std::string>(&v)) {
    out += sql_quote(*s);
  } else if (const auto* t = std::get_if<Timestamp>(&v)) {
    out += "TIMESTAMP " + sql_quote(format_timestamp_sql(*t));
  } else if (const auto* g = std::get_if<GeometryPtr>(&v)) {
    out += "ST_GEOMFROMTEXT(" + sql_quote(*g ? to_wkt(**g) : "") + ")";
  } else {
    out += display_value(v);
  }
}

void print(const Expr& e, int, std::string& out) {
  const int p = precedence(e);
  switch (e.kind) {
    case ExprKind::Literal:
      print_literal(e.literal, out);
      return;
    case ExprKind::Column:
      if (!e.qualifier.empty()) out += e.qualifier + ".";
      out += e.name;
      return;
    case ExprKind::Interval:
      out += "INTERVAL " + std::to_string(e.interval_amount) + " " + e.interval_unit;
      return;
    case ExprKind::Unary:
      if (e.op == Op::Not) {
        out += "NOT ";
        print_child(*e.args[0], p, out);
      } else {
        out += '-';
        print_child(*e.args[0], p, out);
      }
      return;
    case ExprKind::Binary:
      print_child(*e.args[0], p, out);
      out += ' ';
      out += op_text(e.op);
      out += ' ';
      print_child(*e.args[1], p + 1, out);
      return;
    case ExprKind::Like:
      print_child(*e.args[0], 5, out);
      out += e.negated ? " NOT LIKE " : " LIKE ";
      print_child(*e.args[1], 5, out);
      return;
    case ExprKind::In:
      print_child(*e.args[0], 5, out);
      out += e.negated ? " NOT IN (" : " IN (";
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        print(*e.args[i], 0, out);
      }
      out += ')';
      return;
    case ExprKind::Between:
      print_child(*e.args[0], 5, out);
      out += e.negated ? " NOT BETWEEN " : " BETWEEN ";
      print_child(*e.args[1], 5, out);
      out += " AND ";
      print_child(*e.args[2], 5, out);
      return;
    case ExprKind::IsNull:
      print_child(*e.args[0], 5, out);
      out += e.negated ? " IS NOT NULL" : " IS NULL";
      return;
    case ExprKind::Function:
      out += e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print(*e.args[i], 0, out);
      }
      out += ')';
      return;
    case ExprKind::Subquery:
      out += "(" + to_sql(*e.subquery) + ")";
      return;
  }
}

}  // namespace

const char* op_text(Op op) {
  switch (op) {
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Not: return "NOT";
    case Op::Neg: return "-";
    case Op::Eq: return "=";
    case Op::Ne: return "<>";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
  }
  return "?";
}

std::string to_sql(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

std::string to_sql(const SelectStmt& s) {
  std::string out = "SELECT ";
  if (s.distinct) out += "DISTINCT ";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ", ";
    const auto& item = s.items[i];
    if (item.star) {
      out += item.star_qualifier.empty() ? "*" : item.star_qualifier + ".*";
      continue;
    }
    out += to_sql(*item.expr);
    if (!item.alias.empty()) out += " AS " + item.alias;
  }
  auto table = [](const TableRef& t) {
    return t.alias.empty() ? t.table : t.table + " " + t.alias;
  };
  out += " FROM " + table(s.from);
  for (const auto& j : s.joins) {
    out += " JOIN " + table(j.table) + " ON " + to_sql(*j.on);
  }
  if (s.where) out += " WHERE " + to_sql(*s.where);
  if (!s.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < s.order_by.size(); ++i) {
      if (i) out += ", ";
      out += to_sql(*s.order_by[i].expr);
      if (s.order_by[i].descending) out += " DESC";
    }
  }
  if (s.limit) out += " LIMIT " + std::to_string(*s.limit);
  return out;
}

SqlAst parse_sql(std::string_view text) {
  Parser parser(text);
  return parser.parse_statement();
}

void resolve(SqlAst& ast, const SchemaRegistry& schema) {
  Resolver resolver(schema);
  resolver.resolve_select(ast);
}

SqlAst prepare(std::string_view text, const SchemaRegistry& schema) {
  SqlAst ast = parse_sql(text);
  resolve(ast, schema);
  return ast;
}

const std::vector<FunctionSig>& sql_functions() {
  static const std::vector<FunctionSig> fns = {
      {"ST_CONTAINS", 2}, {"ST_DISTANCE", 2},     {"SOUNDS_LIKE", 2},
      {"POINT", 2},       {"ST_GEOMFROMTEXT", 1}, {"NOW", 0},
      {"LOWER", 1},       {"UPPER", 1},           {"ABS", 1},
  };
  return fns;
}

}  // namespace vtsql::sql
