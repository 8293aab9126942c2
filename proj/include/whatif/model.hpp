#pragma once

// Mixed-integer linear programs over named, entity-indexed variable families.
//
// Variables are addressed as family[entity,entity,...]. Each family has an
// ordered index space of entity kinds; the concrete variables of a family are
// the cross product of the registered entity lists, laid out in row-major
// order as a contiguous block of columns. Column ids (VarId) are stable:
// families are only ever appended.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "whatif/error.hpp"

namespace whatif {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTol = 1e-6;

// kind -> ordered entity names. Ordering is fixed at registration.
class EntityRegistry {
 public:
  void add_kind(std::string kind, std::vector<std::string> names);

  bool has_kind(std::string_view kind) const;
  const std::vector<std::string>& entities(std::string_view kind) const;
  // Position of `name` within `kind`, or -1.
  std::ptrdiff_t position(std::string_view kind, std::string_view name) const;
  // True when `name` is registered under any kind.
  bool is_entity(std::string_view name) const;
  const std::vector<std::string>& kinds() const { return kinds_; }

  friend bool operator==(const EntityRegistry& a, const EntityRegistry& b) {
    return a.kinds_ == b.kinds_ && a.entities_ == b.entities_;
  }

 private:
  struct Kind {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
    friend bool operator==(const Kind& a, const Kind& b) { return a.names == b.names; }
  };
  std::vector<std::string> kinds_;
  std::map<std::string, Kind, std::less<>> entities_;
};

enum class VarDomain { Integer, Binary, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };
enum class ObjectiveSense { Minimize, Maximize };

std::string_view to_string(VarDomain d);
std::string_view to_string(Sense s);
std::string_view to_string(ObjectiveSense s);

using VarId = std::uint32_t;

struct VarFamily {
  std::string name;
  std::vector<std::string> index_space;
  VarDomain domain = VarDomain::Continuous;
  VarId first = 0;
  std::size_t size = 0;
  std::vector<std::size_t> extents;
};

struct Term {
  VarId var;
  double coef;
  friend bool operator==(const Term&, const Term&) = default;
};

class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}

  LinExpr& add(VarId var, double coef = 1.0) {
    terms_.push_back({var, coef});
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double factor);

  // Sorts by column, merges duplicate columns and drops zero coefficients.
  void normalize();

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

  friend bool operator==(const LinExpr&, const LinExpr&) = default;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator*(double factor, LinExpr e);

struct Constraint {
  std::string name;
  LinExpr lhs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// A named summand of the objective (e.g. "purchase", "shipping").
struct ObjectivePart {
  std::string name;
  LinExpr expr;
};

// Dense value vector indexed by VarId. NaN marks an unset entry.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit Assignment(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool has(VarId v) const;
  double operator[](VarId v) const;  // throws MissingVariable
  double& at(VarId v) { return values_.at(v); }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<double> values_;
};

class Model {
 public:
  explicit Model(EntityRegistry registry, std::string name = {});

  const std::string& name() const { return name_; }
  const EntityRegistry& registry() const { return registry_; }

  // Declares a family over the cross product of `index_space` with uniform
  // bounds. Integer families need a finite upper bound; binary families are
  // clamped to [0,1].
  const VarFamily& add_family(std::string name, std::vector<std::string> index_space,
                              VarDomain domain, double lower, double upper);
  const VarFamily* find_family(std::string_view name) const;
  const std::vector<VarFamily>& families() const { return families_; }
  std::size_t num_vars() const { return lower_.size(); }

  VarId var(std::string_view family, std::span<const std::string> index) const;
  VarId var(std::string_view family, std::initializer_list<std::string_view> index) const;
  const VarFamily& family_of(VarId v) const;
  std::vector<std::string> index_of(VarId v) const;
  std::string var_name(VarId v) const;

  double lower(VarId v) const { return lower_.at(v); }
  double upper(VarId v) const { return upper_.at(v); }
  VarDomain domain(VarId v) const { return family_of(v).domain; }
  bool is_integral(VarId v) const { return domain(v) != VarDomain::Continuous; }
  void set_bounds(VarId v, double lower, double upper);

  void add_constraint(Constraint c);
  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool has_constraint(std::string_view name) const;

  void set_objective(LinExpr objective, ObjectiveSense sense);
  // Objective is the sum of the parts; parts feed cost breakdowns.
  void set_objective(std::vector<ObjectivePart> parts, ObjectiveSense sense);
  const LinExpr& objective() const { return objective_; }
  const std::vector<ObjectivePart>& objective_parts() const { return parts_; }
  ObjectiveSense sense() const { return sense_; }

  // Canonical text dump; format documented in docs/formats.md.
  std::string dump() const;

 private:
  LinExpr checked(LinExpr e, std::string_view where) const;

  std::string name_;
  EntityRegistry registry_;
  std::vector<VarFamily> families_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::uint32_t> family_index_;  // per column
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, std::size_t> constraint_index_;
  LinExpr objective_;
  std::vector<ObjectivePart> parts_;
  ObjectiveSense sense_ = ObjectiveSense::Minimize;
};

// Models are value types; a snapshot is a deep copy.
inline Model snapshot(const Model& m) { return m; }

// Exact dot product plus constant. Throws MissingVariable.
double evaluate(const LinExpr& expr, const Assignment& assignment);

// --- name-addressed construction ------------------------------------------

struct VarKey {
  std::string family;
  std::vector<std::string> index;
};
struct NamedTerm {
  double coef;
  VarKey var;
};
struct NamedExpr {
  std::vector<NamedTerm> terms;
  double constant = 0.0;
};
struct NamedConstraint {
  std::string name;
  NamedExpr lhs;
  Sense sense;
  double rhs;
};
struct FamilySpec {
  std::string name;
  std::vector<std::string> index_space;
  VarDomain domain;
  double lower;
  double upper;
};

LinExpr resolve(const Model& model, const NamedExpr& expr);

Model build_model(EntityRegistry registry, const std::vector<FamilySpec>& families,
                  const std::vector<NamedConstraint>& constraints, const NamedExpr& objective,
                  ObjectiveSense sense);

// Shortest round-trip decimal text for a double ("150", "1.1", "-0.5", "inf").
std::string format_number(double v);

}  // namespace whatif
