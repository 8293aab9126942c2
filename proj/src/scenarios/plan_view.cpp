#include <cmath>
#include <map>
#include <set>

#include "whatif/scenario.hpp"

namespace whatif {

PlanGraph plan_view(const Scenario& scenario, const Model& model, const Assignment& assignment) {
  const auto violated = verify(model, assignment);
  if (!violated.empty()) {
    throw Error(ErrorKind::InfeasibleAssignment,
                "assignment violates " + std::to_string(violated.size()) + " constraint(s), first " +
                    violated.front());
  }

  std::vector<double> obj_coef(model.num_vars(), 0.0);
  for (const auto& t : model.objective().terms()) obj_coef[t.var] = t.coef;

  PlanGraph g;
  std::set<std::string> node_kinds_seen;
  std::vector<std::string> node_kinds;
  std::map<std::pair<std::string, std::string>, std::size_t> arc_index;

  for (const auto& spec : scenario.plan_arcs) {
    const VarFamily* fam = model.find_family(spec.family);
    if (fam == nullptr) continue;
    for (const std::size_t pos : {spec.from_pos, spec.to_pos}) {
      if (node_kinds_seen.insert(fam->index_space[pos]).second) {
        node_kinds.push_back(fam->index_space[pos]);
      }
    }
    for (std::size_t k = 0; k < fam->size; ++k) {
      const VarId v = fam->first + static_cast<VarId>(k);
      const double q = assignment[v];
      if (std::abs(q) <= kIntegralityTol) continue;
      const auto idx = model.index_of(v);
      const auto key = std::make_pair(idx[spec.from_pos], idx[spec.to_pos]);
      auto [it, inserted] = arc_index.emplace(key, g.arcs.size());
      if (inserted) g.arcs.push_back({key.first, key.second, {}, 0.0});
      PlanArc& arc = g.arcs[it->second];
      const std::string label = spec.label_pos ? idx[*spec.label_pos] : spec.label;
      arc.flows.push_back({label, q});
      arc.cost += obj_coef[v] * q;
    }
  }
  for (const auto& kind : node_kinds) {
    for (const auto& e : model.registry().entities(kind)) g.nodes.push_back({e, kind});
  }
  if (model.objective_parts().empty()) {
    g.breakdown.push_back({"total", evaluate(model.objective(), assignment)});
  } else {
    for (const auto& part : model.objective_parts()) {
      g.breakdown.push_back({part.name, evaluate(part.expr, assignment)});
    }
  }
  g.total = evaluate(model.objective(), assignment);
  return g;
}

PlanGraph plan_view(const Scenario& scenario, const Assignment& assignment) {
  return plan_view(scenario, scenario.build(), assignment);
}

}  // namespace whatif
