// Scenario data files: '%' directives declare entities and parameter index
// spaces, the body holds Python-style literal assignments
//   name = {'a': 1, ...}   or   name = {('a', 'b'): 1, ...}   or   name = 3
// See docs/formats.md.

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "whatif/scenario.hpp"

namespace whatif {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::DataFormat, "line " + std::to_string(line) + ": " + what);
}

struct Token {
  enum Kind { Ident, String, Number, Punct, End } kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 0;
};

class Lexer {
 public:
  explicit Lexer(std::vector<std::pair<std::size_t, std::string>> lines)
      : lines_(std::move(lines)) {}

  Token next() {
    while (true) {
      if (row_ >= lines_.size()) return {Token::End, "", 0.0, last_line()};
      const std::string& s = lines_[row_].second;
      while (col_ < s.size() && std::isspace(static_cast<unsigned char>(s[col_]))) ++col_;
      if (col_ >= s.size() || s[col_] == '#' || s[col_] == '\\') {
        ++row_;
        col_ = 0;
        continue;
      }
      const std::size_t line = lines_[row_].first;
      const char c = s[col_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = col_;
        while (col_ < s.size() && (std::isalnum(static_cast<unsigned char>(s[col_])) ||
                                   s[col_] == '_')) {
          ++col_;
        }
        return {Token::Ident, s.substr(b, col_ - b), 0.0, line};
      }
      if (c == '\'' || c == '"') {
        const std::size_t close = s.find(c, col_ + 1);
        if (close == std::string::npos) fail(line, "unterminated string");
        std::string text = s.substr(col_ + 1, close - col_ - 1);
        col_ = close + 1;
        return {Token::String, std::move(text), 0.0, line};
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
        std::size_t b = col_;
        if (c == '+') ++b;
        double v = 0.0;
        const auto res = std::from_chars(s.data() + b, s.data() + s.size(), v);
        if (res.ec != std::errc() || !std::isfinite(v)) fail(line, "bad number");
        col_ = static_cast<std::size_t>(res.ptr - s.data());
        return {Token::Number, s.substr(b, col_ - b), v, line};
      }
      ++col_;
      return {Token::Punct, std::string(1, c), 0.0, line};
    }
  }

 private:
  std::size_t last_line() const { return lines_.empty() ? 0 : lines_.back().first; }

  std::vector<std::pair<std::size_t, std::string>> lines_;
  std::size_t row_ = 0;
  std::size_t col_ = 0;
};

struct ParamDecl {
  std::vector<std::string> kinds;
  bool is_mutable = true;
  std::size_t line = 0;
};

class BodyParser {
 public:
  BodyParser(Lexer lexer, const EntityRegistry& registry,
             const std::map<std::string, ParamDecl>& decls)
      : lex_(std::move(lexer)), registry_(registry), decls_(decls) {
    advance();
  }

  std::map<std::string, ParamTable> parse() {
    std::map<std::string, ParamTable> tables;
    while (tok_.kind != Token::End) {
      if (tok_.kind != Token::Ident) fail(tok_.line, "expected parameter name");
      const std::string name = tok_.text;
      const std::size_t line = tok_.line;
      auto decl = decls_.find(name);
      if (decl == decls_.end()) fail(line, "parameter '" + name + "' has no %param declaration");
      if (tables.count(name) != 0) fail(line, "parameter '" + name + "' assigned twice");
      advance();
      expect("=");
      ParamTable table(name, decl->second.kinds, registry_, decl->second.is_mutable);
      std::vector<bool> seen(table.size(), false);
      if (tok_.kind == Token::Number) {
        if (!decl->second.kinds.empty()) fail(line, "'" + name + "' is indexed; expected {");
        table.set_value(0, tok_.number);
        seen[0] = true;
        advance();
      } else {
        expect("{");
        while (!is("}")) {
          std::vector<std::string> key = parse_key();
          expect(":");
          if (tok_.kind != Token::Number) fail(tok_.line, "expected number");
          const double v = tok_.number;
          const std::size_t vline = tok_.line;
          advance();
          if (key.size() != decl->second.kinds.size()) {
            fail(vline, "'" + name + "' key has wrong arity");
          }
          const auto off = table.offset(key);
          if (off < 0) {
            std::string joined;
            for (const auto& k : key) joined += (joined.empty() ? "" : ",") + k;
            fail(vline, "'" + name + "' key (" + joined + ") is outside its index space");
          }
          if (seen[static_cast<std::size_t>(off)]) fail(vline, "'" + name + "' duplicate key");
          seen[static_cast<std::size_t>(off)] = true;
          table.set_value(static_cast<std::size_t>(off), v);
          if (is(",")) advance();
          else if (!is("}")) fail(tok_.line, "expected , or }");
        }
        advance();
      }
      for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) {
          std::string idx;
          for (const auto& e : table.index_of(k)) idx += (idx.empty() ? "" : ",") + e;
          fail(line, "'" + name + "' missing entry [" + idx + "]");
        }
      }
      tables.emplace(name, std::move(table));
    }
    for (const auto& [name, decl] : decls_) {
      if (tables.count(name) == 0) fail(decl.line, "parameter '" + name + "' never assigned");
    }
    return tables;
  }

 private:
  void advance() { tok_ = lex_.next(); }
  bool is(std::string_view p) const { return tok_.kind == Token::Punct && tok_.text == p; }
  void expect(std::string_view p) {
    if (!is(p)) fail(tok_.line, "expected '" + std::string(p) + "'");
    advance();
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> key;
    if (tok_.kind == Token::String) {
      key.push_back(tok_.text);
      advance();
      return key;
    }
    expect("(");
    while (tok_.kind == Token::String) {
      key.push_back(tok_.text);
      advance();
      if (is(",")) advance();
    }
    expect(")");
    return key;
  }

  Lexer lex_;
  Token tok_{Token::End, "", 0.0, 0};
  const EntityRegistry& registry_;
  const std::map<std::string, ParamDecl>& decls_;
};

}  // namespace

Scenario parse_scenario(std::string_view id, std::string_view text) {
  Scenario sc;
  sc.id = std::string(id);
  std::vector<std::pair<std::size_t, std::string>> body;
  std::map<std::string, ParamDecl> decls;
  std::vector<std::string> decl_order;
  std::vector<std::string> describe;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] != '%') {
      body.emplace_back(line_no, raw);
      continue;
    }
    const auto space = line.find(' ');
    const std::string directive = line.substr(1, space == std::string::npos ? line.npos : space - 1);
    const std::string rest = space == std::string::npos ? "" : trim(line.substr(space + 1));
    if (directive == "scenario") {
      if (rest != id) fail(line_no, "file declares scenario '" + rest + "'");
    } else if (directive == "entity") {
      const auto colon = rest.find(':');
      if (colon == std::string::npos) fail(line_no, "%entity needs 'kind: names'");
      try {
        sc.registry.add_kind(trim(rest.substr(0, colon)), split_list(rest.substr(colon + 1)));
      } catch (const Error& e) {
        fail(line_no, e.detail());
      }
    } else if (directive == "param") {
      const auto open = rest.find('(');
      const auto close = rest.find(')');
      if (open == std::string::npos || close == std::string::npos || close < open) {
        fail(line_no, "%param needs 'name(kind, ...)'");
      }
      ParamDecl d;
      d.line = line_no;
      d.kinds = split_list(rest.substr(open + 1, close - open - 1));
      if (d.kinds.size() == 1 && d.kinds[0].empty()) d.kinds.clear();
      for (const auto& k : d.kinds) {
        if (!sc.registry.has_kind(k)) fail(line_no, "unknown entity kind '" + k + "'");
      }
      d.is_mutable = trim(rest.substr(close + 1)) != "fixed";
      const std::string name = trim(rest.substr(0, open));
      if (!decls.emplace(name, d).second) fail(line_no, "parameter '" + name + "' declared twice");
      decl_order.push_back(name);
    } else if (directive == "deny") {
      for (auto& w : split_list(rest)) {
        if (!w.empty()) sc.denied_keywords.push_back(std::move(w));
      }
    } else if (directive == "describe") {
      describe.push_back(rest);
    } else {
      fail(line_no, "unknown directive %" + directive);
    }
  }

  for (std::size_t i = 0; i < describe.size(); ++i) {
    sc.description += (i ? "\n" : "") + describe[i];
  }
  auto tables = BodyParser(Lexer(std::move(body)), sc.registry, decls).parse();
  for (const auto& name : decl_order) sc.params.add(std::move(tables.at(name)));
  sc.builder = builder_for(id);
  sc.plan_arcs = plan_arcs_for(id);
  return sc;
}

}  // namespace whatif
