#include <algorithm>
#include <cmath>

#include "whatif/scenario.hpp"

namespace whatif {

namespace {

using Names = std::vector<std::string>;

double nonneg_floor(double v) { return std::max(0.0, std::floor(v + kIntegralityTol)); }

// Supplier -> roastery -> cafe network with light and dark roasts.
Model build_coffee(const EntityRegistry& reg, const ParamSet& p) {
  const Names& suppliers = reg.entities("supplier");
  const Names& roasteries = reg.entities("roastery");
  const Names& cafes = reg.entities("cafe");
  const ParamTable& capacity = p.at("capacity_in_supplier");
  const ParamTable& purchase = p.at("shipping_cost_from_supplier_to_roastery");
  const ParamTable& roast_light = p.at("roasting_cost_light");
  const ParamTable& roast_dark = p.at("roasting_cost_dark");
  const ParamTable& ship = p.at("shipping_cost_from_roastery_to_cafe");
  const ParamTable& light_need = p.at("light_coffee_needed_for_cafe");
  const ParamTable& dark_need = p.at("dark_coffee_needed_for_cafe");

  Model m(reg, "coffee_distribution");
  double total_capacity = 0.0;
  for (const auto& s : suppliers) total_capacity += std::max(0.0, capacity({s}));
  m.add_family("x", {"supplier", "roastery"}, VarDomain::Integer, 0.0, 0.0);
  m.add_family("y_light", {"roastery", "cafe"}, VarDomain::Integer, 0.0,
               nonneg_floor(total_capacity));
  m.add_family("y_dark", {"roastery", "cafe"}, VarDomain::Integer, 0.0,
               nonneg_floor(total_capacity));
  for (const auto& s : suppliers) {
    for (const auto& r : roasteries) m.set_bounds(m.var("x", {s, r}), 0.0, nonneg_floor(capacity({s})));
  }

  LinExpr purchase_cost, light_cost, dark_cost, ship_cost;
  for (const auto& s : suppliers) {
    for (const auto& r : roasteries) purchase_cost.add(m.var("x", {s, r}), purchase({s, r}));
  }
  for (const auto& r : roasteries) {
    for (const auto& c : cafes) {
      const VarId yl = m.var("y_light", {r, c});
      const VarId yd = m.var("y_dark", {r, c});
      light_cost.add(yl, roast_light({r}));
      dark_cost.add(yd, roast_dark({r}));
      ship_cost.add(yl, ship({r, c})).add(yd, ship({r, c}));
    }
  }
  m.set_objective({{"purchase", purchase_cost},
                   {"roasting_light", light_cost},
                   {"roasting_dark", dark_cost},
                   {"shipping", ship_cost}},
                  ObjectiveSense::Minimize);

  for (const auto& r : roasteries) {
    LinExpr flow;
    for (const auto& s : suppliers) flow.add(m.var("x", {s, r}));
    for (const auto& c : cafes) flow.add(m.var("y_light", {r, c}), -1).add(m.var("y_dark", {r, c}), -1);
    m.add_constraint({"flow_" + r, flow, Sense::Equal, 0.0});
  }
  for (const auto& s : suppliers) {
    LinExpr out;
    for (const auto& r : roasteries) out.add(m.var("x", {s, r}));
    m.add_constraint({"supply_" + s, out, Sense::LessEqual, capacity({s})});
  }
  for (const auto& c : cafes) {
    LinExpr light, dark;
    for (const auto& r : roasteries) {
      light.add(m.var("y_light", {r, c}));
      dark.add(m.var("y_dark", {r, c}));
    }
    m.add_constraint({"light_demand_" + c, light, Sense::GreaterEqual, light_need({c})});
    m.add_constraint({"dark_demand_" + c, dark, Sense::GreaterEqual, dark_need({c})});
  }
  return m;
}

// Capacitated facility location: open facilities, ship to customers.
Model build_facility_location(const EntityRegistry& reg, const ParamSet& p) {
  const Names& facilities = reg.entities("facility");
  const Names& customers = reg.entities("customer");
  const ParamTable& fixed = p.at("fixed_cost");
  const ParamTable& capacity = p.at("capacity");
  const ParamTable& demand = p.at("demand");
  const ParamTable& transport = p.at("transport_cost");

  Model m(reg, "facility_location");
  m.add_family("open", {"facility"}, VarDomain::Binary, 0.0, 1.0);
  m.add_family("ship", {"facility", "customer"}, VarDomain::Integer, 0.0, 0.0);
  for (const auto& f : facilities) {
    for (const auto& c : customers) {
      m.set_bounds(m.var("ship", {f, c}), 0.0, nonneg_floor(capacity({f})));
    }
  }
  LinExpr fixed_cost, transport_cost;
  for (const auto& f : facilities) {
    fixed_cost.add(m.var("open", {f}), fixed({f}));
    for (const auto& c : customers) transport_cost.add(m.var("ship", {f, c}), transport({f, c}));
  }
  m.set_objective({{"fixed", fixed_cost}, {"transport", transport_cost}},
                  ObjectiveSense::Minimize);
  for (const auto& c : customers) {
    LinExpr served;
    for (const auto& f : facilities) served.add(m.var("ship", {f, c}));
    m.add_constraint({"demand_" + c, served, Sense::GreaterEqual, demand({c})});
  }
  for (const auto& f : facilities) {
    LinExpr load;
    for (const auto& c : customers) load.add(m.var("ship", {f, c}));
    load.add(m.var("open", {f}), -capacity({f}));
    m.add_constraint({"capacity_" + f, load, Sense::LessEqual, 0.0});
  }
  return m;
}

// Two commodities sharing arc capacities; node pairs without capacity are
// not arcs.
Model build_mcnf(const EntityRegistry& reg, const ParamSet& p) {
  const Names& commodities = reg.entities("commodity");
  const Names& nodes = reg.entities("node");
  const ParamTable& cap = p.at("arc_capacity");
  const ParamTable& cost = p.at("arc_cost");
  const ParamTable& supply = p.at("net_supply");

  Model m(reg, "multi_commodity_flow");
  m.add_family("flow", {"commodity", "node", "node"}, VarDomain::Integer, 0.0, 0.0);
  LinExpr transport;
  for (const auto& i : nodes) {
    for (const auto& j : nodes) {
      const double c = i == j ? 0.0 : nonneg_floor(cap({i, j}));
      for (const auto& k : commodities) {
        const VarId v = m.var("flow", {k, i, j});
        m.set_bounds(v, 0.0, c);
        if (c > 0.0) transport.add(v, cost({i, j}));
      }
    }
  }
  m.set_objective({{"transport", transport}}, ObjectiveSense::Minimize);
  for (const auto& i : nodes) {
    for (const auto& j : nodes) {
      if (i == j || cap({i, j}) <= 0.0) continue;
      LinExpr shared;
      for (const auto& k : commodities) shared.add(m.var("flow", {k, i, j}));
      m.add_constraint({"arc_" + i + "_" + j, shared, Sense::LessEqual, cap({i, j})});
    }
  }
  for (const auto& k : commodities) {
    for (const auto& n : nodes) {
      LinExpr balance;
      for (const auto& o : nodes) {
        if (o == n) continue;
        balance.add(m.var("flow", {k, n, o}), 1.0).add(m.var("flow", {k, o, n}), -1.0);
      }
      m.add_constraint({"balance_" + k + "_" + n, balance, Sense::Equal, supply({k, n})});
    }
  }
  return m;
}

// Workers staff tasks they are qualified for, within per-worker load limits.
Model build_workforce(const EntityRegistry& reg, const ParamSet& p) {
  const Names& workers = reg.entities("worker");
  const Names& tasks = reg.entities("task");
  const ParamTable& cost = p.at("assign_cost");
  const ParamTable& qualified = p.at("qualified");
  const ParamTable& max_tasks = p.at("max_tasks");
  const ParamTable& staff = p.at("task_staff");

  Model m(reg, "workforce_assignment");
  m.add_family("assign", {"worker", "task"}, VarDomain::Binary, 0.0, 1.0);
  LinExpr labor;
  for (const auto& w : workers) {
    for (const auto& t : tasks) {
      const VarId v = m.var("assign", {w, t});
      m.set_bounds(v, 0.0, qualified({w, t}) >= 0.5 ? 1.0 : 0.0);
      labor.add(v, cost({w, t}));
    }
  }
  m.set_objective({{"labor", labor}}, ObjectiveSense::Minimize);
  for (const auto& t : tasks) {
    LinExpr crew;
    for (const auto& w : workers) crew.add(m.var("assign", {w, t}));
    m.add_constraint({"staff_" + t, crew, Sense::GreaterEqual, staff({t})});
  }
  for (const auto& w : workers) {
    LinExpr load;
    for (const auto& t : tasks) load.add(m.var("assign", {w, t}));
    m.add_constraint({"load_" + w, load, Sense::LessEqual, max_tasks({w})});
  }
  return m;
}

// Complete-graph TSP with Miller-Tucker-Zemlin subtour elimination; the
// first city is the depot.
Model build_tsp(const EntityRegistry& reg, const ParamSet& p) {
  const Names& cities = reg.entities("city");
  const ParamTable& dist = p.at("distance");
  const auto n = static_cast<double>(cities.size());

  Model m(reg, "tsp");
  m.add_family("x", {"city", "city"}, VarDomain::Binary, 0.0, 1.0);
  m.add_family("u", {"city"}, VarDomain::Continuous, 1.0, n - 1.0);
  m.set_bounds(m.var("u", {cities.front()}), 0.0, 0.0);
  LinExpr travel;
  for (const auto& i : cities) {
    for (const auto& j : cities) {
      const VarId v = m.var("x", {i, j});
      if (i == j) {
        m.set_bounds(v, 0.0, 0.0);
      } else {
        travel.add(v, dist({i, j}));
      }
    }
  }
  m.set_objective({{"travel", travel}}, ObjectiveSense::Minimize);
  for (const auto& i : cities) {
    LinExpr out, in;
    for (const auto& j : cities) {
      if (i == j) continue;
      out.add(m.var("x", {i, j}));
      in.add(m.var("x", {j, i}));
    }
    m.add_constraint({"leave_" + i, out, Sense::Equal, 1.0});
    m.add_constraint({"enter_" + i, in, Sense::Equal, 1.0});
  }
  for (std::size_t a = 1; a < cities.size(); ++a) {
    for (std::size_t b = 1; b < cities.size(); ++b) {
      if (a == b) continue;
      const auto& i = cities[a];
      const auto& j = cities[b];
      LinExpr order;
      order.add(m.var("u", {i})).add(m.var("u", {j}), -1.0).add(m.var("x", {i, j}), n);
      m.add_constraint({"order_" + i + "_" + j, order, Sense::LessEqual, n - 1.0});
    }
  }
  return m;
}

}  // namespace

ModelBuilder builder_for(std::string_view id) {
  if (id == "coffee") return build_coffee;
  if (id == "facility_location") return build_facility_location;
  if (id == "mcnf") return build_mcnf;
  if (id == "workforce") return build_workforce;
  if (id == "tsp") return build_tsp;
  throw Error(ErrorKind::UnknownScenario, "no scenario '" + std::string(id) + "'");
}

std::vector<PlanArcFamily> plan_arcs_for(std::string_view id) {
  if (id == "coffee") {
    return {{"x", 0, 1, std::nullopt, ""},
            {"y_light", 0, 1, std::nullopt, "L"},
            {"y_dark", 0, 1, std::nullopt, "D"}};
  }
  if (id == "facility_location") return {{"ship", 0, 1, std::nullopt, ""}};
  if (id == "mcnf") return {{"flow", 1, 2, 0, ""}};
  if (id == "workforce") return {{"assign", 0, 1, std::nullopt, ""}};
  if (id == "tsp") return {{"x", 0, 1, std::nullopt, ""}};
  throw Error(ErrorKind::UnknownScenario, "no scenario '" + std::string(id) + "'");
}

}  // namespace whatif
