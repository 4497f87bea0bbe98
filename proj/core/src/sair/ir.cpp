#include <array>
#include <charconv>

#include "vtsql/sair/sair.hpp"
#include "vtsql/util/text.hpp"

namespace vtsql::sair {
namespace {

std::string print_real(double d) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string s(buf.data(), ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string print_coord(double d) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), ptr);
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Rel:
      out += "(rel " + n.table;
      if (!n.alias.empty()) out += " " + n.alias;
      out += ')';
      return;
    case NodeKind::Project:
      out += "(project (";
      for (std::size_t i = 0; i < n.columns.size(); ++i) {
        if (i) out += ' ';
        out += print(n.columns[i]);
      }
      out += ") ";
      break;
    case NodeKind::Select:
      out += "(select " + print(*n.pred) + " ";
      break;
    case NodeKind::Join:
      out += "(join " + print(*n.pred) + " ";
      break;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ' ';
    print_node(n.children[i], out);
  }
  out += ')';
}

}  // namespace

bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.head == b.head && a.qualifier == b.qualifier && a.name == b.name &&
         a.literal == b.literal && a.minutes == b.minutes && a.shape == b.shape && a.args == b.args;
}

bool operator==(const Node& a, const Node& b) {
  return a.kind == b.kind && a.table == b.table && a.alias == b.alias && a.columns == b.columns &&
         a.pred == b.pred && a.children == b.children;
}

std::string print(const Term& t) {
  switch (t.kind) {
    case TermKind::Column:
      return t.qualifier.empty() ? t.name : t.qualifier + "." + t.name;
    case TermKind::Literal:
      if (const auto* s = std::get_if<std::string>(&t.literal)) return quote(*s);
      if (const auto* i = std::get_if<std::int64_t>(&t.literal)) return std::to_string(*i);
      if (const auto* d = std::get_if<double>(&t.literal)) return print_real(*d);
      if (const auto* ts = std::get_if<Timestamp>(&t.literal)) {
        return "(ts '" + format_timestamp_sql(*ts) + "')";
      }
      return "null";
    case TermKind::Interval:
      return "(minutes " + std::to_string(t.minutes) + ")";
    case TermKind::Now:
      return "(now)";
    case TermKind::Contains: {
      std::string out = "(st_contains ";
      if (t.shape.inline_polygon()) {
        out += "(polygon";
        for (const auto& v : t.shape.polygon) {
          out += " (" + print_coord(v.lat) + " " + print_coord(v.lon) + ")";
        }
        out += ")";
      } else {
        out += "(shape " + quote(t.shape.name) + ")";
      }
      out += " (" + print(t.args[0]) + " " + print(t.args[1]) + "))";
      return out;
    }
    default:
      break;
  }
  std::string out = "(" + t.head;
  for (const auto& a : t.args) out += " " + print(a);
  out += ')';
  return out;
}

std::string print(const SairExpr& e) {
  std::string out;
  print_node(e, out);
  return out;
}

std::vector<std::string> explain(const SairExpr& e) {
  std::vector<std::string> lines;
  auto walk = [&](auto&& self, const Node& n, std::size_t depth) -> void {
    std::string line(depth * 2, ' ');
    switch (n.kind) {
      case NodeKind::Project: {
        line += "PROJECT ";
        for (std::size_t i = 0; i < n.columns.size(); ++i) {
          if (i) line += ", ";
          line += print(n.columns[i]);
        }
        break;
      }
      case NodeKind::Select: line += "SELECT " + print(*n.pred); break;
      case NodeKind::Join: line += "JOIN " + print(*n.pred); break;
      case NodeKind::Rel:
        line += "REL " + n.table;
        if (!n.alias.empty()) line += " AS " + n.alias;
        break;
    }
    lines.push_back(std::move(line));
    for (const auto& c : n.children) self(self, c, depth + 1);
  };
  walk(walk, e, 0);
  return lines;
}

}  // namespace vtsql::sair
