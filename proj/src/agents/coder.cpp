#include "whatif/agents.hpp"

namespace whatif::agents {

namespace {

// No multi-digit numbers here: the prompt privacy check scans for parameter
// values, and nothing in the cheat sheet should look like data.
constexpr std::string_view kCheatSheet = R"(### EDIT LANGUAGE
Answer with an edit program, one statement per line, nothing else.
  SET param[i, j] = number           overwrite parameter entries
  SCALE param[i, j] BY number        multiply parameter entries (factor > 0)
  FIX var[i, j] = number             pin decision variables
  CONSTR expr (<= | >= | =) expr     add a linear constraint
  LIMIT-ACTIVE var[i, j] <= k        at most k of the matched variables may be nonzero
Index elements: an entity name, * (every entity), or * != name (every entity but one).
Expressions: terms joined by + or -, each a number, number * var[...], or
SUM var[...] when the index contains a wildcard.
SET and SCALE change the data before the model is rebuilt; the other statements
add constraints to the rebuilt model. Use only the names listed above.
)";

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string render_example(const Example& e) {
  std::string program = e.program;
  if (!program.empty() && program.back() != '\n') program += '\n';
  return "QUESTION: " + e.question + "\nPROGRAM:\n" + program + "\n";
}

}  // namespace

std::string preamble(const Scenario& scenario) {
  std::string out = "### CONTEXT\n" + scenario.description + "\n\n### ENTITIES\n";
  for (const auto& kind : scenario.registry.kinds()) {
    out += kind + ": " + join(scenario.registry.entities(kind)) + "\n";
  }
  out += "\n### DECISION VARIABLES\n";
  const Model m = scenario.build();
  for (const auto& f : m.families()) {
    out += f.name + "[" + join(f.index_space) + "] " + std::string(to_string(f.domain)) + "\n";
  }
  out += "\n### PARAMETERS\n";
  for (const auto& t : scenario.params.tables()) {
    out += t.name();
    if (!t.index_space().empty()) out += "[" + join(t.index_space()) + "]";
    out += t.is_mutable() ? "\n" : " (read-only)\n";
  }
  out += "\n";
  out += kCheatSheet;
  return out;
}

std::string PromptBundle::render() const {
  std::string out = preamble;
  out += "\n### EXAMPLES\n";
  for (const auto& e : examples) out += render_example(e);
  out += "### QUESTION\nQUESTION: " + query + "\nPROGRAM:\n";
  return out;
}

PromptBundle coder(const std::string& question, const Scenario& scenario,
                   std::vector<Example> examples, std::size_t char_budget) {
  PromptBundle b{preamble(scenario), {}, question, char_budget};
  // Newlines would let a question forge prompt sections.
  for (char& c : b.query) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  const std::size_t bare = b.render().size();
  if (bare > char_budget) {
    throw Error(ErrorKind::BudgetTooSmall, "prompt needs " + std::to_string(bare) +
                                               " characters without examples, budget is " +
                                               std::to_string(char_budget));
  }
  std::size_t used = bare;
  for (auto& e : examples) {
    const std::size_t size = render_example(e).size();
    if (used + size > char_budget) break;
    used += size;
    b.examples.push_back(std::move(e));
  }
  return b;
}

}  // namespace whatif::agents
