#pragma once

// What-if edit language. One statement per line:
//
//   SET   param[pattern] = number          data edit, before model build
//   SCALE param[pattern] BY number         data edit, before model build
//   FIX   family[pattern] = number         constraint edit, after build
//   CONSTR expr (<=|>=|=) expr             constraint edit, after build
//   LIMIT-ACTIVE family[pattern] <= k      at most k matched variables nonzero
//
// Pattern elements are entity names, `*`, or `* != name`. Wildcards inside
// expressions require SUM. Full grammar in docs/dsl.md.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "whatif/model.hpp"
#include "whatif/scenario.hpp"

namespace whatif::dsl {

inline constexpr std::size_t kMaxStatements = 20;
inline constexpr double kMaxMagnitude = 1e10;

struct PatternElem {
  enum class Kind { Literal, Any, AnyExcept };
  Kind kind = Kind::Literal;
  std::string entity;  // empty for Any

  static PatternElem literal(std::string e) { return {Kind::Literal, std::move(e)}; }
  static PatternElem any() { return {Kind::Any, {}}; }
  static PatternElem except(std::string e) { return {Kind::AnyExcept, std::move(e)}; }
  bool matches(std::string_view e) const {
    return kind == Kind::Any || (kind == Kind::Literal ? e == entity : e != entity);
  }
  friend bool operator==(const PatternElem&, const PatternElem&) = default;
};

// name[elem, ...]; an empty element list addresses a scalar parameter.
struct Pattern {
  std::string name;
  std::vector<PatternElem> elems;
  bool has_wildcard() const;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class DataOp { Set, Scale };

struct DataEdit {
  DataOp op = DataOp::Set;
  Pattern param;
  double value = 0.0;
  friend bool operator==(const DataEdit&, const DataEdit&) = default;
};

// coef * var  or  coef * SUM pattern
struct Atom {
  double coef = 1.0;
  bool sum = false;
  Pattern var;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Expr {
  std::vector<Atom> atoms;
  double constant = 0.0;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct FixEdit {
  Pattern var;
  double value = 0.0;
  friend bool operator==(const FixEdit&, const FixEdit&) = default;
};

struct ConstrEdit {
  Expr lhs;
  Sense sense = Sense::LessEqual;
  Expr rhs;
  friend bool operator==(const ConstrEdit&, const ConstrEdit&) = default;
};

struct LimitActiveEdit {
  Pattern var;
  std::int64_t limit = 0;
  friend bool operator==(const LimitActiveEdit&, const LimitActiveEdit&) = default;
};

using ConstraintEdit = std::variant<FixEdit, ConstrEdit, LimitActiveEdit>;

struct EditProgram {
  std::vector<DataEdit> data_edits;
  std::vector<ConstraintEdit> constraint_edits;

  std::size_t size() const { return data_edits.size() + constraint_edits.size(); }
  bool empty() const { return size() == 0; }
  friend bool operator==(const EditProgram&, const EditProgram&) = default;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::vector<std::string> expected,
              std::string found);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

// Throws dsl::SyntaxError (kind ErrorKind::SyntaxError) at the first error.
EditProgram parse(std::string_view text);

// Canonical text, one statement per line; data edits first.
std::string render(const EditProgram& program);
std::string render(const DataEdit& edit);
std::string render(const ConstraintEdit& edit);
std::string render(const Pattern& pattern);

struct Violation {
  ErrorKind kind;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// The safeguard. Empty result means the program may be applied.
std::vector<Violation> validate(const EditProgram& program, const Scenario& scenario);

// First keyword from the scenario's deny list found in `text`
// (case-insensitive), or empty.
std::string find_denied_keyword(std::string_view text, const Scenario& scenario);

inline constexpr std::string_view kApprovalRequired =
    "sensitive information. Approval required!";

struct AppliedEdit {
  Model model;
  ParamSet params;
};

// Data edits on a copy of the parameters, rebuild, then constraint edits.
// Throws the first violation as an Error when the program does not validate.
AppliedEdit apply(const EditProgram& program, const Scenario& scenario);

// Same, on top of explicit parameters (e.g. a session's committed state).
AppliedEdit apply(const EditProgram& program, const Scenario& scenario, const ParamSet& params);

// Validates only `program`, then applies `committed` followed by `program`:
// data edits in order, then all constraint edits.
AppliedEdit apply_on(const EditProgram& committed, const EditProgram& program,
                     const Scenario& scenario);

EditProgram concat(const EditProgram& a, const EditProgram& b);

// Throws the first violation (if any) as an Error.
void require_valid(const EditProgram& program, const Scenario& scenario);

}  // namespace whatif::dsl
