#include <charconv>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "whatif/benchmark.hpp"

namespace whatif::bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::DataFormat, "line " + std::to_string(line) + ": " + msg);
}

const std::regex& placeholder_re() {
  static const std::regex re(R"(\{\{\s*(VALUE-[A-Za-z0-9_-]+)\s*\}\})");
  return re;
}

void check_macro(const Macro& m) {
  if (m.question.empty()) bad(m.line, "macro without QUESTION");
  if (m.type.empty()) bad(m.line, "macro without TYPE");
  std::set<std::string> defined;
  for (const auto& [name, expr] : m.values) {
    if (!defined.insert(name).second) bad(m.line, "duplicate " + name);
    if (expr.empty()) bad(m.line, name + " has no generator");
  }
  for (const std::string* text : {&m.question, &m.data, &m.constraint}) {
    for (std::sregex_iterator it(text->begin(), text->end(), placeholder_re()), end; it != end;
         ++it) {
      if (!defined.count((*it)[1])) bad(m.line, "placeholder " + (*it)[1].str() + " has no generator");
    }
  }
}

}  // namespace

std::vector<Macro> parse_macros(std::string_view text) {
  static const std::regex field(R"(^(NAME|QUESTION|TYPE|DATA|CONSTRAINT|VALUE-[A-Za-z0-9_-]+):(.*)$)");
  std::vector<Macro> out;
  Macro cur;
  std::string field_name;
  bool open = false;
  std::set<std::string> names;

  auto close = [&](std::size_t line) {
    if (!open) return;
    if (cur.name.empty()) cur.name = cur.type;
    check_macro(cur);
    if (!names.insert(cur.name).second) bad(line, "duplicate macro name '" + cur.name + "'");
    out.push_back(std::move(cur));
    cur = Macro{};
    field_name.clear();
    open = false;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (!raw.empty() && raw.front() == '#') continue;
    if (trim(raw).empty()) {
      close(line_no);
      continue;
    }
    std::smatch m;
    if (std::regex_match(raw, m, field)) {
      if (!open) {
        open = true;
        cur.line = line_no;
      }
      field_name = m[1];
      const std::string rest = trim(m[2].str());
      if (field_name == "NAME") {
        cur.name = rest;
      } else if (field_name == "TYPE") {
        cur.type = rest;
      } else if (field_name == "QUESTION") {
        cur.question = rest;
      } else if (field_name == "DATA") {
        if (!rest.empty()) cur.data += rest + "\n";
      } else if (field_name == "CONSTRAINT") {
        if (!rest.empty()) cur.constraint += rest + "\n";
      } else {
        cur.values.emplace_back(field_name, rest);
      }
      continue;
    }
    static const std::regex unknown_field(R"(^[A-Z][A-Z0-9_-]*:.*$)");
    if (std::regex_match(raw, unknown_field)) {
      bad(line_no, "unknown field '" + raw.substr(0, raw.find(':')) + "'");
    }
    if (field_name == "QUESTION") {
      cur.question += (cur.question.empty() ? "" : " ") + trim(raw);
    } else if (field_name == "DATA") {
      cur.data += trim(raw) + "\n";
    } else if (field_name == "CONSTRAINT") {
      cur.constraint += trim(raw) + "\n";
    } else {
      bad(line_no, "expected a field such as QUESTION:, VALUE-X:, DATA:, CONSTRAINT: or TYPE:");
    }
  }
  close(line_no);
  return out;
}

std::vector<Macro> load_macros(const std::string& scenario_id, const std::string& data_dir) {
  const std::string path = data_dir + "/macros/" + scenario_id + ".macros";
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_macros(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

// --- generators ------------------------------------------------------------------

namespace {

struct Value {
  enum class Kind { Number, Text, Tuple, List };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  std::vector<std::string> tuple;
  std::vector<std::vector<std::string>> list;

  static Value num(double v) { return {Kind::Number, v, {}, {}, {}}; }
  static Value str(std::string s) { return {Kind::Text, 0.0, std::move(s), {}, {}}; }
  static Value tup(std::vector<std::string> t) {
    if (t.size() == 1) return str(t.front());
    return {Kind::Tuple, 0.0, {}, std::move(t), {}};
  }

  std::string show() const {
    switch (kind) {
      case Kind::Number: return format_number(number);
      case Kind::Text: return text;
      case Kind::Tuple: {
        std::string s = "(";
        for (std::size_t i = 0; i < tuple.size(); ++i) s += (i ? "," : "") + tuple[i];
        return s + ")";
      }
      case Kind::List: return "[" + std::to_string(list.size()) + " items]";
    }
    return {};
  }
};

[[noreturn]] void gen_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::GeneratorError, where + ": " + msg);
}

class Evaluator {
 public:
  Evaluator(const Scenario& sc, const Model& model, const SolveResult& baseline,
            std::mt19937_64& rng, const std::map<std::string, Value>& env, std::string where)
      : sc_(sc), model_(model), baseline_(baseline), rng_(rng), env_(env), where_(std::move(where)) {}

  Value run(std::string_view expr) {
    src_ = expr;
    pos_ = 0;
    Value v = postfix();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(src_.substr(pos_)) + "'");
    return v;
  }

 private:
  // Bare names stay names until a function decides what they mean.
  struct Arg {
    Value value;
    bool bare = false;
  };

  [[noreturn]] void fail(const std::string& msg) const { gen_error(where_, msg); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
            src_[pos_] == '-')) {
      ++pos_;
    }
    if (b == pos_) fail("expected a name at '" + std::string(src_.substr(b)) + "'");
    return std::string(src_.substr(b, pos_ - b));
  }

  Value postfix() {
    Arg a = primary();
    Value v = a.value;
    while (eat('[')) {
      const Value idx = postfix();
      if (!eat(']')) fail("expected ']'");
      if (idx.kind != Value::Kind::Number) fail("index must be a number");
      const auto i = static_cast<std::size_t>(idx.number);
      if (v.kind == Value::Kind::List) {
        if (i >= v.list.size()) fail("index " + std::to_string(i) + " out of range");
        v = Value::tup(v.list[i]);
      } else if (v.kind == Value::Kind::Tuple) {
        if (i >= v.tuple.size()) fail("index " + std::to_string(i) + " out of range");
        v = Value::str(v.tuple[i]);
      } else {
        fail("cannot index " + v.show());
      }
    }
    return v;
  }

  Arg primary() {
    skip();
    if (pos_ < src_.size() &&
        (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-')) {
      double v = 0;
      const auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
      if (res.ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(res.ptr - src_.data());
      return {Value::num(v), false};
    }
    const std::string name = ident();
    if (name.rfind("VALUE-", 0) == 0) {
      const auto it = env_.find(name);
      if (it == env_.end()) fail(name + " is used before it is generated");
      return {it->second, false};
    }
    if (!eat('(')) return {Value::str(name), true};
    std::vector<Arg> args;
    if (!eat(')')) {
      do {
        skip();
        const std::size_t at = pos_;
        Value v = postfix();
        // Re-detect bare names: a lone identifier that is not a VALUE reference.
        const std::string piece = trim(src_.substr(at, pos_ - at));
        const bool bare = v.kind == Value::Kind::Text && piece == v.text &&
                          piece.rfind("VALUE-", 0) != 0;
        args.push_back({std::move(v), bare});
      } while (eat(','));
      if (!eat(')')) fail("expected ')'");
    }
    return {call(name, args), false};
  }

  std::size_t draw(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  double number_arg(const Arg& a, const std::string& fn) const {
    if (a.value.kind != Value::Kind::Number) fail(fn + " expects a number, got " + a.value.show());
    return a.value.number;
  }

  Value call(const std::string& fn, const std::vector<Arg>& args) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n) fail(fn + " takes " + std::to_string(n) + " argument(s)");
    };
    if (fn == "choice") {
      if (args.empty()) fail("choice needs arguments");
      if (args.size() == 1 && args[0].bare && sc_.registry.has_kind(args[0].value.text)) {
        const auto& ents = sc_.registry.entities(args[0].value.text);
        if (ents.empty()) fail("choice(" + args[0].value.text + ") has nothing to choose from");
        return Value::str(ents[draw(ents.size())]);
      }
      if (args.size() == 1 && args[0].value.kind == Value::Kind::List) {
        const auto& l = args[0].value.list;
        if (l.empty()) fail("choice over an empty list");
        return Value::tup(l[draw(l.size())]);
      }
      return args[draw(args.size())].value;
    }
    if (fn == "other") {
      arity(2);
      if (!args[0].bare || !sc_.registry.has_kind(args[0].value.text)) {
        fail("other expects an entity kind first");
      }
      std::vector<std::string> pool;
      for (const auto& e : sc_.registry.entities(args[0].value.text)) {
        if (e != args[1].value.text) pool.push_back(e);
      }
      if (pool.empty()) fail("other(" + args[0].value.text + ", ...) has nothing to choose from");
      return Value::str(pool[draw(pool.size())]);
    }
    if (fn == "int") {
      arity(2);
      const auto lo = static_cast<long long>(number_arg(args[0], fn));
      const auto hi = static_cast<long long>(number_arg(args[1], fn));
      if (hi <= lo) fail("int(" + std::to_string(lo) + ", " + std::to_string(hi) + ") is empty");
      return Value::num(static_cast<double>(lo + static_cast<long long>(draw(hi - lo))));
    }
    if (fn == "len") {
      arity(1);
      const Value& v = args[0].value;
      if (v.kind == Value::Kind::List) return Value::num(static_cast<double>(v.list.size()));
      if (v.kind == Value::Kind::Tuple) return Value::num(static_cast<double>(v.tuple.size()));
      fail("len expects a list");
    }
    if (fn == "percent_factor") {
      arity(1);
      return Value::num(1.0 + number_arg(args[0], fn) / 100.0);
    }
    if (fn == "active") {
      arity(1);
      const VarFamily* fam = model_.find_family(args[0].value.text);
      if (fam == nullptr) fail("unknown variable family '" + args[0].value.text + "'");
      if (!baseline_.optimal()) fail("active() needs an optimal baseline");
      Value v{Value::Kind::List, 0.0, {}, {}, {}};
      for (std::size_t k = 0; k < fam->size; ++k) {
        const VarId id = fam->first + static_cast<VarId>(k);
        if ((*baseline_.assignment)[id] >= 0.999) v.list.push_back(model_.index_of(id));
      }
      return v;
    }
    fail("unknown generator '" + fn + "'");
  }

  const Scenario& sc_;
  const Model& model_;
  const SolveResult& baseline_;
  std::mt19937_64& rng_;
  const std::map<std::string, Value>& env_;
  std::string where_;
  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string substitute(const std::string& text, const std::map<std::string, Value>& env,
                       const std::string& where) {
  std::string out;
  auto last = text.cbegin();
  for (std::sregex_iterator it(text.begin(), text.end(), placeholder_re()), end; it != end; ++it) {
    out.append(last, (*it)[0].first);
    const Value& v = env.at((*it)[1]);
    if (v.kind != Value::Kind::Number && v.kind != Value::Kind::Text) {
      gen_error(where, (*it)[1].str() + " is " + v.show() + ", not a name or number");
    }
    out += v.show();
    last = (*it)[0].second;
  }
  out.append(last, text.cend());
  return out;
}

}  // namespace

std::vector<QuestionInstance> expand(const Macro& macro, const Scenario& scenario,
                                     const SolveResult& baseline, std::size_t count,
                                     std::uint64_t seed) {
  const Model model = scenario.build();
  std::mt19937_64 rng(seed);
  std::vector<QuestionInstance> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::string where = "macro " + macro.name;
    std::map<std::string, Value> env;
    std::string trace;
    for (const auto& [name, expr] : macro.values) {
      Evaluator ev(scenario, model, baseline, rng, env, where + ", " + name);
      Value v = ev.run(expr);
      trace += (trace.empty() ? "" : " ") + name + "=" + v.show();
      env.insert_or_assign(name, std::move(v));
    }
    QuestionInstance q;
    q.id = macro.name + "#" + std::to_string(n);
    q.macro = macro.name;
    q.type = macro.type;
    q.text = substitute(macro.question, env, where);
    q.seed_trace = trace;
    const std::string program = substitute(macro.data, env, where) +
                                substitute(macro.constraint, env, where);
    try {
      q.ground_truth = dsl::parse(program);
    } catch (const Error& e) {
      gen_error(where, std::string("ground truth does not parse: ") + e.what());
    }
    const auto violations = dsl::validate(q.ground_truth, scenario);
    if (!violations.empty()) {
      gen_error(where, "ground truth is invalid: " + violations.front().message);
    }
    q.program_text = dsl::render(q.ground_truth);
    out.push_back(std::move(q));
  }
  return out;
}

QuestionInstance rephrase(const QuestionInstance& q, agents::LlmClient& llm) {
  if (!llm.live()) throw Error(ErrorKind::LlmUnavailable, "rephrasing needs a live LLM");
  const std::string prompt =
      "Rewrite the question below in different words. Keep every name and number, and keep "
      "the meaning exactly the same. Reply with the rewritten question only.\n\nQuestion: " +
      q.text + "\n";
  std::string text = llm.complete(prompt, 256, 0.7);
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  QuestionInstance out = q;
  out.text = trim(text);
  if (out.text.empty()) throw Error(ErrorKind::LlmUnavailable, "empty paraphrase");
  return out;
}

}  // namespace whatif::bench
