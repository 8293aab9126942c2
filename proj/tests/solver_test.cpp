#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "support/coffee.hpp"
#include "support/oracles.hpp"
#include "support/tiny_model.hpp"
#include "whatif/simplex.hpp"
#include "whatif/solver.hpp"

using namespace whatif;
using testing_support::tiny_model;

namespace {

Model one_var(VarDomain domain, double lo, double hi) {
  EntityRegistry reg;
  reg.add_kind("k", {"a", "b"});
  Model m(reg);
  m.add_family("x", {"k"}, domain, lo, hi);
  return m;
}

}  // namespace

TEST_CASE("lp: two-variable textbook problem") {
  // max 3a + 5b, a <= 4, 2b <= 12, 3a + 2b <= 18  ->  36 at (2, 6)
  lp::Problem p;
  p.rows = 3;
  p.cols = 2;
  p.matrix = {1, 0, 0, 2, 3, 2};
  p.sense.assign(3, Sense::LessEqual);
  p.rhs = {4, 12, 18};
  p.cost = {-3, -5};
  p.lower = {0, 0};
  p.upper = {kInfinity, kInfinity};
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == doctest::Approx(-36));
  CHECK(s.x[0] == doctest::Approx(2));
  CHECK(s.x[1] == doctest::Approx(6));
}

TEST_CASE("lp: unbounded and infeasible") {
  lp::Problem p;
  p.rows = 1;
  p.cols = 2;
  p.matrix = {1, -1};
  p.sense = {Sense::LessEqual};
  p.rhs = {1};
  p.cost = {-1, 0};
  p.lower = {0, 0};
  p.upper = {kInfinity, kInfinity};
  CHECK(lp::solve(p).status == lp::Status::Unbounded);

  p.matrix = {1, 1};
  p.sense = {Sense::GreaterEqual};
  p.rhs = {5};
  p.upper = {2, 2};
  CHECK(lp::solve(p).status == lp::Status::Infeasible);
}

TEST_CASE("lp: degenerate problem terminates under Bland") {
  // A classic cycling example for Dantzig's rule without anti-cycling.
  lp::Problem p;
  p.rows = 3;
  p.cols = 4;
  p.matrix = {0.5, -5.5, -2.5, 9, 0.5, -1.5, -0.5, 1, 1, 0, 0, 0};
  p.sense.assign(3, Sense::LessEqual);
  p.rhs = {0, 0, 1};
  p.cost = {-10, 57, 9, 24};
  p.lower.assign(4, 0);
  p.upper.assign(4, kInfinity);
  lp::Options opt;
  opt.bland_after = 0;
  const auto s = lp::solve(p, opt);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == doctest::Approx(-1));
  CHECK(lp::solve(p).objective == doctest::Approx(-1));
}

TEST_CASE("infeasible model: x >= 5 and x <= 4") {
  Model m = one_var(VarDomain::Integer, 0, 10);
  m.add_constraint({"lo", LinExpr().add(0), Sense::GreaterEqual, 5});
  m.add_constraint({"hi", LinExpr().add(0), Sense::LessEqual, 4});
  m.set_objective(LinExpr().add(0), ObjectiveSense::Minimize);
  const auto r = solve(m);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.objective.has_value());
  CHECK_FALSE(r.assignment.has_value());
}

TEST_CASE("unbounded continuous model") {
  Model m = one_var(VarDomain::Continuous, 0, kInfinity);
  m.set_objective(LinExpr().add(0).add(1), ObjectiveSense::Maximize);
  CHECK(solve(m).status == SolveStatus::Unbounded);
}

TEST_CASE("model with no constraints sits at its bounds") {
  Model m = one_var(VarDomain::Integer, -3, 4);
  m.set_objective(LinExpr().add(0, 2).add(1, -1), ObjectiveSense::Minimize);
  const auto r = solve(m);
  REQUIRE(r.optimal());
  CHECK(*r.objective == -10);
  CHECK((*r.assignment)[0] == -3);
  CHECK((*r.assignment)[1] == 4);
}

TEST_CASE("coffee: LP relaxation bounds the integer optimum") {
  const Model m = testing_support::coffee().build();
  const auto relax = solve_lp(m);
  const auto mip = solve(m);
  REQUIRE(relax.optimal());
  REQUIRE(mip.optimal());
  CHECK(*mip.objective == 2470);
  CHECK(*relax.objective <= *mip.objective + 1e-9);
  CHECK(verify(m, *mip.assignment).empty());
}

TEST_CASE("random tiny MIPs agree with exhaustive enumeration") {
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CAPTURE(seed);
    const auto tiny = oracle::random_tiny_mip(seed);
    const auto expect = oracle::enumerate(tiny);
    const Model m = tiny_model(tiny);
    const auto r = solve(m);
    if (!expect) {
      CHECK(r.status == SolveStatus::Infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(r.optimal());
    CHECK(*r.objective == doctest::Approx(static_cast<double>(*expect)).epsilon(1e-6));
    CHECK(verify(m, *r.assignment).empty());
  }
  CHECK(feasible >= 30);  // the generator must exercise both outcomes
  CHECK(feasible <= 95);
}

TEST_CASE("branching rules reach the same optimum") {
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const Model m = tiny_model(oracle::random_tiny_mip(seed));
    SolverConfig first;
    first.branching = Branching::FirstFractional;
    const auto a = solve(m);
    const auto b = solve(m, first);
    REQUIRE(a.status == b.status);
    if (a.optimal()) CHECK(*a.objective == doctest::Approx(*b.objective));
  }
}

TEST_CASE("solve is deterministic") {
  const Model m = testing_support::coffee().build();
  const auto first = solve(m);
  for (int i = 0; i < 10; ++i) {
    const auto again = solve(m);
    CHECK(again.status == first.status);
    CHECK(*again.objective == *first.objective);
    CHECK(again.assignment->values() == first.assignment->values());
    CHECK(again.nodes_explored == first.nodes_explored);
  }
}

TEST_CASE("scaling demand tenfold makes coffee infeasible") {
  const auto& sc = testing_support::coffee();
  ParamSet params = sc.params;
  for (const char* name : {"light_coffee_needed_for_cafe", "dark_coffee_needed_for_cafe"}) {
    ParamTable& t = *params.find(name);
    for (std::size_t k = 0; k < t.size(); ++k) t.set_value(k, t.value(k) * 10);
  }
  const auto r = solve(sc.build(params));
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.objective.has_value());
}

TEST_CASE("fractional demand rounds up instead of diving forever") {
  const auto& sc = testing_support::coffee();
  ParamSet scaled = sc.params;
  ParamSet rounded = sc.params;
  for (const char* name : {"light_coffee_needed_for_cafe", "dark_coffee_needed_for_cafe"}) {
    scaled.find(name)->set_value(0, 20 * 1.16);
    rounded.find(name)->set_value(0, 24);
  }
  const auto r = solve(sc.build(scaled));
  REQUIRE(r.optimal());
  CHECK(r.nodes_explored < 50);
  // Integer flows must cover 23.2 with 24: same optimum as the rounded data,
  // whose relaxation is a network LP and therefore integral.
  const auto lp = solve_lp(sc.build(rounded));
  REQUIRE(lp.optimal());
  CHECK(*r.objective == doctest::Approx(*lp.objective));
  CHECK(*r.objective > *solve_lp(sc.build(scaled)).objective);
}

TEST_CASE("integer equality rows with fractional right-hand sides") {
  Model m = one_var(VarDomain::Integer, 0, 10);
  m.add_constraint({"eq", LinExpr().add(0).add(1), Sense::Equal, 2.5});
  m.set_objective(LinExpr().add(0), ObjectiveSense::Minimize);
  CHECK(solve(m).status == SolveStatus::Infeasible);

  Model c = one_var(VarDomain::Continuous, 0, 10);
  c.add_constraint({"eq", LinExpr().add(0).add(1), Sense::Equal, 2.5});
  c.set_objective(LinExpr().add(0), ObjectiveSense::Minimize);
  CHECK(solve(c).optimal());
}

TEST_CASE("objective constants count toward pruning and the result") {
  Model m = one_var(VarDomain::Integer, 0, 10);
  m.add_constraint({"cover", LinExpr().add(0, 2).add(1, 2), Sense::GreaterEqual, 5});
  m.set_objective(LinExpr(7.5).add(0, 3).add(1, 2), ObjectiveSense::Minimize);
  const auto r = solve(m);
  REQUIRE(r.optimal());
  CHECK(*r.objective == doctest::Approx(13.5));  // x = (0, 3)
}

TEST_CASE("node limit is surfaced, not hidden") {
  const Model m = whatif::load_scenario("tsp").build();
  SolverConfig cfg;
  cfg.node_limit = 3;
  const auto r = solve(m, cfg);
  CHECK(r.status == SolveStatus::NodeLimit);
  CHECK(r.nodes_explored <= 3);
  CHECK(to_string(r.status) == "node_limit");
}

TEST_CASE("trace prints one line per node") {
  const Model m = tiny_model(oracle::random_tiny_mip(5));
  std::ostringstream trace;
  SolverConfig cfg;
  cfg.trace = &trace;
  const auto r = solve(m, cfg);
  std::size_t lines = 0;
  for (char c : trace.str()) lines += c == '\n';
  CHECK(lines == r.nodes_explored);
}

TEST_CASE("verify: zero plan violates every demand row") {
  const Model m = testing_support::coffee().build();
  const auto bad = verify(m, Assignment(m.num_vars(), 0.0));
  CHECK(bad.size() == 6);
  for (const auto& name : bad) CHECK(name.find("_demand_") != std::string::npos);
}

TEST_CASE("verify: perturbing one shipment breaks its conservation row") {
  const Model m = testing_support::coffee().build();
  Assignment plan = testing_support::coffee_published_plan(m);
  CHECK(verify(m, plan).empty());
  plan.at(m.var("x", {"supplier1", "roastery2"})) = 81;
  CHECK(verify(m, plan) == std::vector<std::string>{"flow_roastery2"});
  plan.at(m.var("x", {"supplier1", "roastery2"})) = 80;
  plan.at(m.var("x", {"supplier3", "roastery1"})) = 100.5;
  const auto bad = verify(m, plan);
  CHECK(std::find(bad.begin(), bad.end(), "integrality:x[supplier3,roastery1]") != bad.end());
}

TEST_CASE("verify: bound violations") {
  const Model m = testing_support::coffee().build();
  Assignment plan = testing_support::coffee_published_plan(m);
  plan.at(m.var("y_dark", {"roastery1", "cafe3"})) = -1;
  const auto bad = verify(m, plan);
  CHECK(std::find(bad.begin(), bad.end(), "bound:y_dark[roastery1,cafe3]") != bad.end());
}
