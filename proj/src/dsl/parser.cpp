#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "whatif/dsl.hpp"

namespace whatif::dsl {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

bool Pattern::has_wildcard() const {
  for (const auto& e : elems) {
    if (e.kind != PatternElem::Kind::Literal) return true;
  }
  return false;
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::vector<std::string> expected,
                         std::string found)
    : Error(ErrorKind::SyntaxError, "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": expected " +
                                        join(expected) + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

struct Token {
  enum class Kind { Word, Number, Op, End };
  Kind kind = Kind::End;
  std::string text;
  double number = 0.0;
  std::size_t column = 0;  // 1-based
};

// Tokens of one line. Words include quoted names; LIMIT-ACTIVE is one word.
std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;
    const std::size_t col = i + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = i;
      while (i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
        ++i;
      }
      std::string word(line.substr(b, i - b));
      if (word == "LIMIT" && line.substr(i, 7) == "-ACTIVE") {
        word = "LIMIT-ACTIVE";
        i += 7;
      }
      out.push_back({Token::Kind::Word, std::move(word), 0.0, col});
      continue;
    }
    if (c == '\'' || c == '"') {
      const auto close = line.find(c, i + 1);
      if (close == std::string_view::npos) {
        throw SyntaxError(line_no, col, {"closing quote"}, "end of line");
      }
      out.push_back({Token::Kind::Word, std::string(line.substr(i + 1, close - i - 1)), 0.0, col});
      i = close + 1;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto res = std::from_chars(line.data() + i, line.data() + line.size(), v);
      if (res.ec != std::errc()) throw SyntaxError(line_no, col, {"number"}, "'" + std::string(1, c) + "'");
      const std::size_t end = static_cast<std::size_t>(res.ptr - line.data());
      out.push_back({Token::Kind::Number, std::string(line.substr(i, end - i)), v, col});
      i = end;
      continue;
    }
    for (std::string_view op : {"<=", ">=", "==", "!="}) {
      if (line.substr(i, 2) == op) {
        out.push_back({Token::Kind::Op, std::string(op), 0.0, col});
        i += 2;
        goto next;
      }
    }
    if (std::string_view("[],*=+-<>").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::Op, std::string(1, c), 0.0, col});
      ++i;
      continue;
    }
    throw SyntaxError(line_no, col, {"statement"}, "'" + std::string(1, c) + "'");
  next:;
  }
  out.push_back({Token::Kind::End, "", 0.0, line.size() + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line_no)
      : toks_(std::move(tokens)), line_(line_no) {}

  void parse_into(EditProgram& program) {
    const Token& head = peek();
    if (head.kind != Token::Kind::Word) fail({"SET", "SCALE", "FIX", "CONSTR", "LIMIT-ACTIVE"});
    if (head.text == "SET") {
      ++pos_;
      DataEdit e{DataOp::Set, pattern(false), 0.0};
      expect_op("=");
      e.value = signed_number();
      program.data_edits.push_back(std::move(e));
    } else if (head.text == "SCALE") {
      ++pos_;
      DataEdit e{DataOp::Scale, pattern(false), 0.0};
      expect_word("BY");
      e.value = signed_number();
      program.data_edits.push_back(std::move(e));
    } else if (head.text == "FIX") {
      ++pos_;
      FixEdit e{pattern(true), 0.0};
      expect_op("=");
      e.value = signed_number();
      program.constraint_edits.emplace_back(std::move(e));
    } else if (head.text == "CONSTR") {
      ++pos_;
      ConstrEdit e;
      e.lhs = expr();
      e.sense = sense();
      e.rhs = expr();
      program.constraint_edits.emplace_back(std::move(e));
    } else if (head.text == "LIMIT-ACTIVE") {
      ++pos_;
      LimitActiveEdit e{pattern(true), 0};
      expect_op("<=");
      const Token& k = peek();
      if (k.kind != Token::Kind::Number || k.number != std::floor(k.number) || k.number < 0) {
        fail({"non-negative integer"});
      }
      e.limit = static_cast<std::int64_t>(k.number);
      ++pos_;
      program.constraint_edits.emplace_back(std::move(e));
    } else {
      fail({"SET", "SCALE", "FIX", "CONSTR", "LIMIT-ACTIVE"});
    }
    if (peek().kind != Token::Kind::End) fail({"end of line"});
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(std::string_view op) const {
    return peek().kind == Token::Kind::Op && peek().text == op;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    const std::string found = t.kind == Token::Kind::End ? "end of line" : "'" + t.text + "'";
    throw SyntaxError(line_, t.column, std::move(expected), found);
  }

  void expect_op(std::string_view op) {
    if (op == "=" && is_op("==")) {
      ++pos_;
      return;
    }
    if (!is_op(op)) fail({"'" + std::string(op) + "'"});
    ++pos_;
  }

  void expect_word(std::string_view w) {
    if (peek().kind != Token::Kind::Word || peek().text != w) fail({std::string(w)});
    ++pos_;
  }

  std::string name() {
    if (peek().kind != Token::Kind::Word || is_keyword(peek().text)) fail({"name"});
    return toks_[pos_++].text;
  }

  static bool is_keyword(std::string_view w) {
    return w == "SET" || w == "SCALE" || w == "BY" || w == "FIX" || w == "CONSTR" ||
           w == "SUM" || w == "LIMIT-ACTIVE";
  }

  double signed_number() {
    double sign = 1.0;
    if (is_op("-")) {
      sign = -1.0;
      ++pos_;
    } else if (is_op("+")) {
      ++pos_;
    }
    if (peek().kind != Token::Kind::Number) fail({"number"});
    return sign * toks_[pos_++].number;
  }

  // name [ '[' elem {',' elem} ']' ]; brackets mandatory for variables.
  Pattern pattern(bool brackets_required) {
    Pattern p;
    p.name = name();
    if (!is_op("[")) {
      if (brackets_required) fail({"'['"});
      return p;
    }
    ++pos_;
    while (true) {
      if (is_op("*")) {
        ++pos_;
        if (is_op("!=")) {
          ++pos_;
          p.elems.push_back(PatternElem::except(name()));
        } else {
          p.elems.push_back(PatternElem::any());
        }
      } else {
        p.elems.push_back(PatternElem::literal(name()));
      }
      if (is_op(",")) {
        ++pos_;
        continue;
      }
      if (is_op("]")) {
        ++pos_;
        break;
      }
      fail({"','", "']'"});
    }
    return p;
  }

  Sense sense() {
    if (is_op("<=")) {
      ++pos_;
      return Sense::LessEqual;
    }
    if (is_op(">=")) {
      ++pos_;
      return Sense::GreaterEqual;
    }
    if (is_op("=") || is_op("==")) {
      ++pos_;
      return Sense::Equal;
    }
    fail({"'<='", "'>='", "'='"});
  }

  // term { (+|-) term }, leading sign allowed.
  Expr expr() {
    Expr e;
    double sign = 1.0;
    if (is_op("-")) {
      sign = -1.0;
      ++pos_;
    } else if (is_op("+")) {
      ++pos_;
    }
    term(e, sign);
    while (is_op("+") || is_op("-")) {
      sign = is_op("-") ? -1.0 : 1.0;
      ++pos_;
      term(e, sign);
    }
    return e;
  }

  void term(Expr& e, double sign) {
    if (peek().kind == Token::Kind::Number) {
      const double v = toks_[pos_++].number;
      if (!is_op("*")) {
        e.constant += sign * v;
        return;
      }
      ++pos_;
      e.atoms.push_back(atom(sign * v));
      return;
    }
    e.atoms.push_back(atom(sign));
  }

  Atom atom(double coef) {
    Atom a;
    a.coef = coef;
    if (peek().kind == Token::Kind::Word && peek().text == "SUM") {
      ++pos_;
      a.sum = true;
      a.var = pattern(true);
      return a;
    }
    if (peek().kind != Token::Kind::Word) fail({"number", "name", "SUM"});
    const std::size_t at = pos_;
    a.var = pattern(true);
    if (a.var.has_wildcard()) {
      pos_ = at;
      throw SyntaxError(line_, peek().column, {"SUM before wildcard pattern"},
                        "'" + a.var.name + "'");
    }
    return a;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace

EditProgram parse(std::string_view text) {
  EditProgram program;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    auto tokens = tokenize(line, line_no);
    if (tokens.size() > 1) LineParser(std::move(tokens), line_no).parse_into(program);
    start = end + 1;
  }
  return program;
}

// --- render ----------------------------------------------------------------

std::string render(const Pattern& p) {
  std::string out = p.name;
  if (p.elems.empty()) return out;
  out += '[';
  for (std::size_t i = 0; i < p.elems.size(); ++i) {
    if (i) out += ',';
    const auto& e = p.elems[i];
    switch (e.kind) {
      case PatternElem::Kind::Literal: out += e.entity; break;
      case PatternElem::Kind::Any: out += '*'; break;
      case PatternElem::Kind::AnyExcept: out += "* != " + e.entity; break;
    }
  }
  out += ']';
  return out;
}

namespace {

std::string render_atom_body(const Atom& a) {
  return (a.sum ? "SUM " : "") + render(a.var);
}

std::string render_expr(const Expr& e) {
  std::string out;
  bool first = true;
  for (const auto& a : e.atoms) {
    const double mag = std::abs(a.coef);
    const bool neg = std::signbit(a.coef);
    std::string body = mag == 1.0 ? render_atom_body(a)
                                  : format_number(mag) + " * " + render_atom_body(a);
    if (first) {
      out += (neg ? "-" : "") + body;
    } else {
      out += (neg ? " - " : " + ") + body;
    }
    first = false;
  }
  if (first) return format_number(e.constant);
  if (e.constant != 0.0) {
    out += (e.constant < 0 ? " - " : " + ") + format_number(std::abs(e.constant));
  }
  return out;
}

}  // namespace

std::string render(const DataEdit& e) {
  if (e.op == DataOp::Set) return "SET " + render(e.param) + " = " + format_number(e.value);
  return "SCALE " + render(e.param) + " BY " + format_number(e.value);
}

std::string render(const ConstraintEdit& edit) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, FixEdit>) {
          return "FIX " + render(e.var) + " = " + format_number(e.value);
        } else if constexpr (std::is_same_v<T, ConstrEdit>) {
          return "CONSTR " + render_expr(e.lhs) + " " + std::string(to_string(e.sense)) + " " +
                 render_expr(e.rhs);
        } else {
          return "LIMIT-ACTIVE " + render(e.var) + " <= " + std::to_string(e.limit);
        }
      },
      edit);
}

std::string render(const EditProgram& program) {
  std::string out;
  for (const auto& e : program.data_edits) out += render(e) + "\n";
  for (const auto& e : program.constraint_edits) out += render(e) + "\n";
  return out;
}

}  // namespace whatif::dsl
