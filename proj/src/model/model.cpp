#include "whatif/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace whatif {

// --- EntityRegistry --------------------------------------------------------

void EntityRegistry::add_kind(std::string kind, std::vector<std::string> names) {
  if (entities_.count(kind) != 0) {
    throw Error(ErrorKind::InvalidModel, "entity kind '" + kind + "' registered twice");
  }
  Kind k;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!k.index.emplace(names[i], i).second) {
      throw Error(ErrorKind::InvalidModel,
                  "duplicate entity '" + names[i] + "' in kind '" + kind + "'");
    }
  }
  k.names = std::move(names);
  kinds_.push_back(kind);
  entities_.emplace(std::move(kind), std::move(k));
}

bool EntityRegistry::has_kind(std::string_view kind) const {
  return entities_.find(kind) != entities_.end();
}

const std::vector<std::string>& EntityRegistry::entities(std::string_view kind) const {
  auto it = entities_.find(kind);
  if (it == entities_.end()) {
    throw Error(ErrorKind::UnknownEntity, "unknown entity kind '" + std::string(kind) + "'");
  }
  return it->second.names;
}

std::ptrdiff_t EntityRegistry::position(std::string_view kind, std::string_view name) const {
  auto it = entities_.find(kind);
  if (it == entities_.end()) return -1;
  auto pos = it->second.index.find(std::string(name));
  return pos == it->second.index.end() ? -1 : static_cast<std::ptrdiff_t>(pos->second);
}

bool EntityRegistry::is_entity(std::string_view name) const {
  const std::string key(name);
  for (const auto& [kind, k] : entities_) {
    if (k.index.count(key) != 0) return true;
  }
  return false;
}

// --- enums -----------------------------------------------------------------

std::string_view to_string(VarDomain d) {
  switch (d) {
    case VarDomain::Integer: return "integer";
    case VarDomain::Binary: return "binary";
    case VarDomain::Continuous: return "continuous";
  }
  return "?";
}

std::string_view to_string(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "?";
}

std::string_view to_string(ObjectiveSense s) {
  return s == ObjectiveSense::Minimize ? "minimize" : "maximize";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// --- LinExpr ---------------------------------------------------------------

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double factor) {
  for (auto& t : terms_) t.coef *= factor;
  constant_ *= factor;
  return *this;
}

void LinExpr::normalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

LinExpr operator+(LinExpr a, const LinExpr& b) {
  a += b;
  return a;
}

LinExpr operator*(double factor, LinExpr e) {
  e *= factor;
  return e;
}

// --- Assignment ------------------------------------------------------------

bool Assignment::has(VarId v) const { return v < values_.size() && !std::isnan(values_[v]); }

double Assignment::operator[](VarId v) const {
  if (!has(v)) {
    throw Error(ErrorKind::MissingVariable, "no value for column " + std::to_string(v));
  }
  return values_[v];
}

double evaluate(const LinExpr& expr, const Assignment& assignment) {
  double total = expr.constant();
  for (const auto& t : expr.terms()) total += t.coef * assignment[t.var];
  return total;
}

// --- Model -----------------------------------------------------------------

Model::Model(EntityRegistry registry, std::string name)
    : name_(std::move(name)), registry_(std::move(registry)) {}

const VarFamily& Model::add_family(std::string name, std::vector<std::string> index_space,
                                   VarDomain domain, double lower, double upper) {
  if (find_family(name) != nullptr) {
    throw Error(ErrorKind::InvalidModel, "family '" + name + "' declared twice");
  }
  if (domain == VarDomain::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw Error(ErrorKind::InvalidModel, "family '" + name + "' has empty bound range");
  }
  if (domain != VarDomain::Continuous && (!std::isfinite(upper) || !std::isfinite(lower))) {
    throw Error(ErrorKind::InvalidModel, "integer family '" + name + "' needs finite bounds");
  }
  VarFamily fam;
  fam.name = std::move(name);
  fam.domain = domain;
  fam.first = static_cast<VarId>(num_vars());
  fam.size = 1;
  for (const auto& kind : index_space) {
    if (!registry_.has_kind(kind)) {
      throw Error(ErrorKind::InvalidModel,
                  "family '" + fam.name + "' indexed by unknown kind '" + kind + "'");
    }
    fam.extents.push_back(registry_.entities(kind).size());
    fam.size *= fam.extents.back();
  }
  fam.index_space = std::move(index_space);
  const auto family_id = static_cast<std::uint32_t>(families_.size());
  lower_.insert(lower_.end(), fam.size, lower);
  upper_.insert(upper_.end(), fam.size, upper);
  family_index_.insert(family_index_.end(), fam.size, family_id);
  families_.push_back(std::move(fam));
  return families_.back();
}

const VarFamily* Model::find_family(std::string_view name) const {
  for (const auto& f : families_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

template <typename Range>
std::string describe(std::string_view family, const Range& index) {
  std::string out(family);
  out += '[';
  bool first = true;
  for (const auto& e : index) {
    if (!first) out += ',';
    out += e;
    first = false;
  }
  out += ']';
  return out;
}

}  // namespace

VarId Model::var(std::string_view family, std::span<const std::string> index) const {
  const VarFamily* fam = find_family(family);
  if (fam == nullptr) {
    throw Error(ErrorKind::UnknownVariable, "unknown family '" + std::string(family) + "'");
  }
  if (index.size() != fam->index_space.size()) {
    throw Error(ErrorKind::IndexOutOfSpace,
                describe(family, index) + " expects " + std::to_string(fam->index_space.size()) +
                    " indices");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto pos = registry_.position(fam->index_space[i], index[i]);
    if (pos < 0) {
      if (registry_.is_entity(index[i])) {
        throw Error(ErrorKind::IndexOutOfSpace, describe(family, index) + ": '" + index[i] +
                                                    "' is not a " + fam->index_space[i]);
      }
      throw Error(ErrorKind::UnknownVariable,
                  describe(family, index) + ": unknown entity '" + index[i] + "'");
    }
    flat = flat * fam->extents[i] + static_cast<std::size_t>(pos);
  }
  return fam->first + static_cast<VarId>(flat);
}

VarId Model::var(std::string_view family, std::initializer_list<std::string_view> index) const {
  std::vector<std::string> idx(index.begin(), index.end());
  return var(family, std::span<const std::string>(idx));
}

const VarFamily& Model::family_of(VarId v) const {
  if (v >= num_vars()) {
    throw Error(ErrorKind::UnknownVariable, "column " + std::to_string(v) + " out of range");
  }
  return families_[family_index_[v]];
}

std::vector<std::string> Model::index_of(VarId v) const {
  const VarFamily& fam = family_of(v);
  std::size_t flat = v - fam.first;
  std::vector<std::string> out(fam.index_space.size());
  for (std::size_t i = fam.index_space.size(); i-- > 0;) {
    out[i] = registry_.entities(fam.index_space[i])[flat % fam.extents[i]];
    flat /= fam.extents[i];
  }
  return out;
}

std::string Model::var_name(VarId v) const {
  return describe(family_of(v).name, index_of(v));
}

void Model::set_bounds(VarId v, double lower, double upper) {
  const VarFamily& fam = family_of(v);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw Error(ErrorKind::InvalidModel, var_name(v) + ": empty bound range");
  }
  if (fam.domain == VarDomain::Binary && (lower < 0.0 || upper > 1.0)) {
    throw Error(ErrorKind::InvalidModel, var_name(v) + ": binary bounds outside [0,1]");
  }
  if (fam.domain != VarDomain::Continuous && (!std::isfinite(lower) || !std::isfinite(upper))) {
    throw Error(ErrorKind::InvalidModel, var_name(v) + ": integer variable needs finite bounds");
  }
  lower_[v] = lower;
  upper_[v] = upper;
}

LinExpr Model::checked(LinExpr e, std::string_view where) const {
  for (const auto& t : e.terms()) {
    if (t.var >= num_vars()) {
      throw Error(ErrorKind::UnknownVariable,
                  std::string(where) + ": column " + std::to_string(t.var) + " not declared");
    }
    if (!std::isfinite(t.coef)) {
      throw Error(ErrorKind::InvalidModel, std::string(where) + ": non-finite coefficient");
    }
  }
  if (!std::isfinite(e.constant())) {
    throw Error(ErrorKind::InvalidModel, std::string(where) + ": non-finite constant");
  }
  e.normalize();
  return e;
}

void Model::add_constraint(Constraint c) {
  if (constraint_index_.count(c.name) != 0) {
    throw Error(ErrorKind::DuplicateConstraintName, "constraint '" + c.name + "' already exists");
  }
  if (!std::isfinite(c.rhs)) {
    throw Error(ErrorKind::InvalidModel, "constraint '" + c.name + "' has non-finite rhs");
  }
  c.lhs = checked(std::move(c.lhs), c.name);
  c.rhs -= c.lhs.constant();
  c.lhs.set_constant(0.0);
  constraint_index_.emplace(c.name, constraints_.size());
  constraints_.push_back(std::move(c));
}

bool Model::has_constraint(std::string_view name) const {
  return constraint_index_.count(std::string(name)) != 0;
}

void Model::set_objective(LinExpr objective, ObjectiveSense sense) {
  objective_ = checked(std::move(objective), "objective");
  parts_.clear();
  sense_ = sense;
}

void Model::set_objective(std::vector<ObjectivePart> parts, ObjectiveSense sense) {
  LinExpr total;
  for (auto& p : parts) {
    p.expr = checked(std::move(p.expr), p.name);
    total += p.expr;
  }
  objective_ = checked(std::move(total), "objective");
  parts_ = std::move(parts);
  sense_ = sense;
}

namespace {

void dump_expr(std::ostringstream& out, const Model& m, const LinExpr& e) {
  bool first = true;
  for (const auto& t : e.terms()) {
    double c = t.coef;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    c = std::abs(c);
    if (c != 1.0) out << format_number(c) << ' ';
    out << m.var_name(t.var);
    first = false;
  }
  if (e.constant() != 0.0 || first) {
    if (first) {
      out << format_number(e.constant());
    } else {
      out << (e.constant() < 0 ? " - " : " + ") << format_number(std::abs(e.constant()));
    }
  }
}

}  // namespace

std::string Model::dump() const {
  std::ostringstream out;
  out << "model " << (name_.empty() ? "unnamed" : name_) << '\n';
  for (const auto& kind : registry_.kinds()) {
    out << "entities " << kind << ':';
    for (const auto& e : registry_.entities(kind)) out << ' ' << e;
    out << '\n';
  }
  for (const auto& fam : families_) {
    out << "family " << fam.name << ' ' << to_string(fam.domain) << " [";
    for (std::size_t i = 0; i < fam.index_space.size(); ++i) {
      out << (i ? "," : "") << fam.index_space[i];
    }
    out << "]\n";
    for (std::size_t k = 0; k < fam.size; ++k) {
      const VarId v = fam.first + static_cast<VarId>(k);
      out << "  " << var_name(v) << " in [" << format_number(lower_[v]) << ", "
          << format_number(upper_[v]) << "]\n";
    }
  }
  out << to_string(sense_) << '\n';
  if (parts_.empty()) {
    out << "  ";
    dump_expr(out, *this, objective_);
    out << '\n';
  } else {
    for (const auto& p : parts_) {
      out << "  " << p.name << ": ";
      dump_expr(out, *this, p.expr);
      out << '\n';
    }
  }
  for (const auto& c : constraints_) {
    out << "constraint " << c.name << ": ";
    dump_expr(out, *this, c.lhs);
    out << ' ' << to_string(c.sense) << ' ' << format_number(c.rhs) << '\n';
  }
  return out.str();
}

// --- name-addressed construction ------------------------------------------

LinExpr resolve(const Model& model, const NamedExpr& expr) {
  LinExpr out(expr.constant);
  for (const auto& t : expr.terms) {
    out.add(model.var(t.var.family, std::span<const std::string>(t.var.index)), t.coef);
  }
  return out;
}

Model build_model(EntityRegistry registry, const std::vector<FamilySpec>& families,
                  const std::vector<NamedConstraint>& constraints, const NamedExpr& objective,
                  ObjectiveSense sense) {
  Model m(std::move(registry));
  for (const auto& f : families) {
    m.add_family(f.name, f.index_space, f.domain, f.lower, f.upper);
  }
  for (const auto& c : constraints) {
    m.add_constraint({c.name, resolve(m, c.lhs), c.sense, c.rhs});
  }
  m.set_objective(resolve(m, objective), sense);
  return m;
}

}  // namespace whatif
