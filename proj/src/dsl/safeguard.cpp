#include <algorithm>
#include <cctype>
#include <cmath>

#include "whatif/dsl.hpp"

namespace whatif::dsl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool matches(const Pattern& p, const std::vector<std::string>& index) {
  if (index.size() != p.elems.size()) return false;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!p.elems[i].matches(index[i])) return false;
  }
  return true;
}

class Checker {
 public:
  Checker(const Scenario& scenario, const Model& model) : sc_(scenario), model_(model) {}

  std::vector<Violation> run(const EditProgram& program) {
    if (program.size() > kMaxStatements) {
      add(ErrorKind::ProgramTooLong, std::to_string(program.size()) + " statements, limit " +
                                         std::to_string(kMaxStatements));
    }
    if (const auto word = find_denied_keyword(render(program), sc_); !word.empty()) {
      add(ErrorKind::SensitiveDataDenied,
          "program touches '" + word + "': " + std::string(kApprovalRequired));
    }
    for (const auto& e : program.data_edits) data(e);
    for (const auto& e : program.constraint_edits) std::visit([&](const auto& x) { edit(x); }, e);
    return std::move(out_);
  }

 private:
  void add(ErrorKind kind, std::string message) { out_.push_back({kind, std::move(message)}); }

  void number(double v, std::string_view where) {
    if (!std::isfinite(v) || std::abs(v) > kMaxMagnitude) {
      add(ErrorKind::MagnitudeExceeded,
          std::string(where) + ": |" + format_number(v) + "| exceeds " + format_number(kMaxMagnitude));
    }
  }

  // Entities named in the pattern must belong to the kind at their position.
  bool entities_ok(const Pattern& p, const std::vector<std::string>& kinds) {
    if (p.elems.size() != kinds.size()) {
      add(ErrorKind::InvalidEdit, render(p) + ": '" + p.name + "' takes " +
                                      std::to_string(kinds.size()) + " indices");
      return false;
    }
    bool ok = true;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const auto& e = p.elems[i];
      if (e.kind == PatternElem::Kind::Any) continue;
      if (sc_.registry.position(kinds[i], e.entity) < 0) {
        add(ErrorKind::UnknownEntity,
            render(p) + ": '" + e.entity + "' is not a known " + kinds[i]);
        ok = false;
      }
    }
    return ok;
  }

  void data(const DataEdit& e) {
    const ParamTable* t = sc_.params.find(e.param.name);
    if (t == nullptr) {
      add(ErrorKind::UnknownParam, "unknown parameter '" + e.param.name + "'");
      return;
    }
    if (!t->is_mutable()) {
      add(ErrorKind::InvalidEdit, "parameter '" + e.param.name + "' is not editable");
    }
    number(e.value, render(e));
    if (e.op == DataOp::Scale && !(e.value > 0.0)) {
      add(ErrorKind::InvalidEdit, render(e) + ": SCALE factor must be positive");
    }
    if (!entities_ok(e.param, t->index_space())) return;
    bool any = false;
    for (std::size_t k = 0; k < t->size() && !any; ++k) any = matches(e.param, t->index_of(k));
    if (!any) add(ErrorKind::UnknownEntity, render(e.param) + " matches no entry");
  }

  // Returns matched columns; records violations when there are none.
  std::vector<VarId> vars(const Pattern& p) {
    const VarFamily* fam = model_.find_family(p.name);
    if (fam == nullptr) {
      add(ErrorKind::UnknownParam, "unknown variable family '" + p.name + "'");
      return {};
    }
    if (!entities_ok(p, fam->index_space)) return {};
    std::vector<VarId> out;
    for (std::size_t k = 0; k < fam->size; ++k) {
      const VarId v = fam->first + static_cast<VarId>(k);
      if (matches(p, model_.index_of(v))) out.push_back(v);
    }
    if (out.empty()) add(ErrorKind::UnknownEntity, render(p) + " matches no variable");
    return out;
  }

  void edit(const FixEdit& e) {
    number(e.value, render(ConstraintEdit(e)));
    vars(e.var);
  }

  void expr(const Expr& x, std::string_view where) {
    number(x.constant, where);
    for (const auto& a : x.atoms) {
      number(a.coef, where);
      vars(a.var);
    }
  }

  void edit(const ConstrEdit& e) {
    const std::string where = render(ConstraintEdit(e));
    expr(e.lhs, where);
    expr(e.rhs, where);
  }

  void edit(const LimitActiveEdit& e) {
    number(static_cast<double>(e.limit), render(ConstraintEdit(e)));
    for (const VarId v : vars(e.var)) {
      if (!std::isfinite(model_.upper(v)) || !std::isfinite(model_.lower(v))) {
        add(ErrorKind::InvalidEdit, "LIMIT-ACTIVE needs finite bounds on " + model_.var_name(v));
        return;
      }
    }
  }

  const Scenario& sc_;
  const Model& model_;
  std::vector<Violation> out_;
};

}  // namespace

std::string find_denied_keyword(std::string_view text, const Scenario& scenario) {
  const std::string hay = lower(text);
  for (const auto& word : scenario.denied_keywords) {
    if (hay.find(lower(word)) != std::string::npos) return word;
  }
  return {};
}

std::vector<Violation> validate(const EditProgram& program, const Scenario& scenario) {
  const Model base = scenario.build();
  return Checker(scenario, base).run(program);
}

void require_valid(const EditProgram& program, const Scenario& scenario) {
  const auto violations = validate(program, scenario);
  if (!violations.empty()) throw Error(violations.front().kind, violations.front().message);
}

// --- apply -----------------------------------------------------------------

namespace {

std::vector<VarId> matched(const Model& m, const Pattern& p) {
  const VarFamily* fam = m.find_family(p.name);
  std::vector<VarId> out;
  if (fam == nullptr) return out;
  for (std::size_t k = 0; k < fam->size; ++k) {
    const VarId v = fam->first + static_cast<VarId>(k);
    if (matches(p, m.index_of(v))) out.push_back(v);
  }
  return out;
}

LinExpr lower_expr(const Model& m, const Expr& e) {
  LinExpr out(e.constant);
  for (const auto& a : e.atoms) {
    for (const VarId v : matched(m, a.var)) out.add(v, a.coef);
  }
  return out;
}

}  // namespace

AppliedEdit apply(const EditProgram& program, const Scenario& scenario) {
  return apply(program, scenario, scenario.params);
}

namespace {

AppliedEdit apply_unchecked(const EditProgram& program, const Scenario& scenario,
                            const ParamSet& params) {
  ParamSet edited = params;
  for (const auto& e : program.data_edits) {
    ParamTable& t = *edited.find(e.param.name);
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (!matches(e.param, t.index_of(k))) continue;
      t.set_value(k, e.op == DataOp::Set ? e.value : t.value(k) * e.value);
    }
  }

  Model model = scenario.build(edited);
  std::size_t n = 0;
  for (const auto& edit : program.constraint_edits) {
    const std::string tag = "edit" + std::to_string(++n);
    if (const auto* fix = std::get_if<FixEdit>(&edit)) {
      std::size_t k = 0;
      for (const VarId v : matched(model, fix->var)) {
        model.add_constraint({tag + "_fix" + std::to_string(++k), LinExpr().add(v), Sense::Equal,
                              fix->value});
      }
    } else if (const auto* c = std::get_if<ConstrEdit>(&edit)) {
      LinExpr row = lower_expr(model, c->lhs);
      row -= lower_expr(model, c->rhs);
      const double rhs = -row.constant();
      row.set_constant(0.0);
      model.add_constraint({tag, std::move(row), c->sense, rhs});
    } else {
      const auto& limit = std::get<LimitActiveEdit>(edit);
      const auto targets = matched(model, limit.var);
      const VarFamily& fam = *model.find_family(limit.var.name);
      const std::vector<std::string> space = fam.index_space;
      const VarFamily& ind = model.add_family(tag + "_active", space, VarDomain::Binary, 0.0, 0.0);
      const VarId ind_first = ind.first;
      const VarId fam_first = model.find_family(limit.var.name)->first;
      LinExpr count;
      std::size_t k = 0;
      for (const VarId v : targets) {
        const VarId z = ind_first + (v - fam_first);
        model.set_bounds(z, 0.0, 1.0);
        count.add(z);
        ++k;
        // v <= ub * z and v >= lb * z: v can be nonzero only when z = 1.
        model.add_constraint({tag + "_upper" + std::to_string(k),
                              LinExpr().add(v).add(z, -model.upper(v)), Sense::LessEqual, 0.0});
        if (model.lower(v) < 0.0) {
          model.add_constraint({tag + "_lower" + std::to_string(k),
                                LinExpr().add(v).add(z, -model.lower(v)), Sense::GreaterEqual,
                                0.0});
        }
      }
      model.add_constraint({tag + "_count", std::move(count), Sense::LessEqual,
                            static_cast<double>(limit.limit)});
    }
  }
  return {std::move(model), std::move(edited)};
}

}  // namespace

AppliedEdit apply(const EditProgram& program, const Scenario& scenario, const ParamSet& params) {
  require_valid(program, scenario);
  return apply_unchecked(program, scenario, params);
}

EditProgram concat(const EditProgram& a, const EditProgram& b) {
  EditProgram out = a;
  out.data_edits.insert(out.data_edits.end(), b.data_edits.begin(), b.data_edits.end());
  out.constraint_edits.insert(out.constraint_edits.end(), b.constraint_edits.begin(),
                              b.constraint_edits.end());
  return out;
}

AppliedEdit apply_on(const EditProgram& committed, const EditProgram& program,
                     const Scenario& scenario) {
  require_valid(program, scenario);
  return apply_unchecked(concat(committed, program), scenario, scenario.params);
}

}  // namespace whatif::dsl
