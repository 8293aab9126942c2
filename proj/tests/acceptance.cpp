// Acceptance checks: one PASS/FAIL line per criterion, exit status = number
// of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "support/coffee.hpp"
#include "support/oracles.hpp"
#include "support/tiny_model.hpp"
#include "whatif/benchmark.hpp"

using namespace whatif;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void report(const char* name, const std::function<Check()>& body) {
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  if (!c.ok) ++failures;
  std::printf("%s  %-28s %s\n", c.ok ? "PASS" : "FAIL", name, c.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::string kExclusiveQuestion =
    "Assume cafe cafe2 can exclusively buy coffee from roasting facility roastery1, and "
    "conversely, roasting facility roastery1 can only sell its coffee to cafe cafe2. How does "
    "that affect the outcome?";

using Rules = std::vector<agents::ScriptedLlm::Rule>;

Check coffee_baseline() {
  Check c;
  const auto t0 = Clock::now();
  const Scenario sc = load_scenario("coffee");
  const SolveResult r = solve(sc.build());
  const double secs = seconds_since(t0);
  c.require(r.status == SolveStatus::Optimal, "status " + std::string(to_string(r.status)));
  c.require(r.objective && std::abs(*r.objective - 2470) <= 1e-6,
            "objective " + (r.objective ? format_number(*r.objective) : "none"));
  c.require(secs < 1.0, "took " + fmt(secs) + " s");
  if (c.ok) {
    c.detail = "optimal, objective " + format_number(*r.objective) + ", load+solve " +
               fmt(secs * 1000, 3) + " ms";
  }
  return c;
}

Check exclusive_whatif() {
  Check c;
  const auto& sc = testing_support::coffee();
  const SolveResult r =
      solve(dsl::apply(dsl::parse(testing_support::kExclusiveProgram), sc).model);
  c.require(r.optimal() && std::abs(*r.objective - 2570) <= 1e-6,
            "objective " + (r.objective ? format_number(*r.objective) : "none"));
  if (!c.ok) return c;

  const agents::Workspace ws(std::make_shared<const Scenario>(sc));
  agents::ScriptedLlm llm(Rules{{"exclusively", {testing_support::kExclusiveProgram}}});
  const auto a = agents::ask(kExclusiveQuestion, ws, llm);
  c.require(a.status == agents::AnswerStatus::Answered, "ask: " + a.error);
  if (!c.ok) return c;
  const double pct = *a.delta_pct;
  c.require(std::abs(pct - 4.05) <= 0.005, "delta " + fmt(pct) + "%");
  c.require(std::lround(pct) == 4, "rounds to " + std::to_string(std::lround(pct)));
  c.require(a.narrative.find("≈ 4%") != std::string::npos, "narrative: " + a.narrative);
  if (c.ok) {
    c.detail = "objective 2570, delta +" + format_number(*a.delta_abs) + " (" + fmt(pct, 3) +
               "%, shown as ≈ 4%)";
  }
  return c;
}

Check solver_oracle() {
  Check c;
  const auto t0 = Clock::now();
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto tiny = oracle::random_tiny_mip(seed);
    const auto expect = oracle::enumerate(tiny);
    const auto r = solve(testing_support::tiny_model(tiny));
    const std::string where = "seed " + std::to_string(seed) + ": ";
    if (!expect) {
      c.require(r.status == SolveStatus::Infeasible, where + "expected infeasible");
      continue;
    }
    ++feasible;
    c.require(r.optimal() && std::abs(*r.objective - static_cast<double>(*expect)) <= 1e-6,
              where + "solver " + (r.objective ? format_number(*r.objective) : "none") +
                  " vs enumeration " + std::to_string(*expect));
  }
  const double secs = seconds_since(t0);
  c.require(secs < 30.0, "took " + fmt(secs) + " s");
  if (c.ok) {
    c.detail = "100/100 match enumeration (" + std::to_string(feasible) + " feasible) in " +
               fmt(secs, 3) + " s";
  }
  return c;
}

// +1: the edit makes the problem harder (cost up, demand up, capacity down),
// -1: easier, 0: mixed or unknown.
int data_direction(const ParamSet& before, const ParamSet& after) {
  int dir = 0;
  bool mixed = false;
  for (const auto& t : after.tables()) {
    const ParamTable& old = *before.find(t.name());
    int sense = 0;
    if (t.name().find("capacity") != std::string::npos) sense = -1;
    if (t.name().find("needed") != std::string::npos || t.name().find("cost") != std::string::npos) {
      sense = 1;
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t.value(k) == old.value(k)) continue;
      if (sense == 0) return 0;
      const int d = (t.value(k) > old.value(k) ? 1 : -1) * sense;
      if (dir != 0 && d != dir) mixed = true;
      dir = d;
    }
  }
  return mixed ? 0 : dir;
}

Check macro_coverage() {
  Check c;
  const auto& sc = testing_support::coffee();
  const double base = *sc.baseline.objective;
  const auto macros = bench::load_macros("coffee");
  c.require(macros.size() == 13, std::to_string(macros.size()) + " macros");
  std::size_t instances = 0, constraint_checks = 0, tighter = 0, looser = 0;
  for (const auto& m : macros) {
    for (const auto& q : bench::expand(m, sc, sc.baseline, 10, 2024)) {
      ++instances;
      const std::string where = q.id + " (" + q.text + "): ";
      c.require(dsl::validate(q.ground_truth, sc).empty(), where + "does not validate");
      const auto applied = dsl::apply(q.ground_truth, sc);
      const SolveResult r = solve(applied.model);
      c.require(r.status == SolveStatus::Optimal || r.status == SolveStatus::Infeasible,
                where + std::string(to_string(r.status)));
      const bool harder_or_infeasible = !r.optimal() || *r.objective >= base - 1e-6;
      const int dir = q.ground_truth.data_edits.empty()
                          ? 1
                          : data_direction(sc.params, applied.params);
      if (q.ground_truth.data_edits.empty()) {
        ++constraint_checks;
        c.require(harder_or_infeasible, where + "constraint edit lowered the cost");
      } else if (dir > 0) {
        ++tighter;
        c.require(harder_or_infeasible, where + "tightening data edit lowered the cost");
      } else if (dir < 0) {
        ++looser;
        const bool ok = q.ground_truth.constraint_edits.empty()
                            ? r.optimal() && *r.objective <= base + 1e-6
                            : true;
        c.require(ok, where + "relaxing data edit raised the cost");
      }
    }
  }
  if (c.ok) {
    c.detail = "13 macros, " + std::to_string(instances) + " instances: " +
               std::to_string(constraint_checks) + " constraint edits >= " + format_number(base) +
               " or infeasible, " + std::to_string(tighter) + " tightening and " +
               std::to_string(looser) + " relaxing data edits move the right way";
  }
  return c;
}

Check equivalent_grading() {
  Check c;
  const auto& sc = testing_support::coffee();
  std::mt19937_64 rng(17);
  const auto& suppliers = sc.registry.entities("supplier");
  const auto& roasteries = sc.registry.entities("roastery");
  const auto& cafes = sc.registry.entities("cafe");
  std::vector<std::string> picked;
  for (int i = 0; i < 10; ++i) {
    std::string fix, priced;
    if (rng() % 2 == 0) {
      const auto& s = suppliers[rng() % suppliers.size()];
      const auto& r = roasteries[rng() % roasteries.size()];
      fix = "FIX x[" + s + "," + r + "] = 0";
      priced = "SET shipping_cost_from_supplier_to_roastery[" + s + "," + r + "] = 1e10";
      picked.push_back(s + "->" + r);
    } else {
      const auto& r = roasteries[rng() % roasteries.size()];
      const auto& k = cafes[rng() % cafes.size()];
      fix = "FIX y_light[" + r + "," + k + "] = 0\nFIX y_dark[" + r + "," + k + "] = 0";
      priced = "SET shipping_cost_from_roastery_to_cafe[" + r + "," + k + "] = 1e10";
      picked.push_back(r + "->" + k);
    }
    bench::QuestionInstance q;
    q.ground_truth = dsl::parse(fix);
    q.program_text = dsl::render(q.ground_truth);
    c.require(bench::grade(q, priced, sc), "arc " + picked.back() + " graded as different");
    c.require(!bench::grade(q, "SET shipping_cost_from_supplier_to_roastery[supplier3,roastery1] = 9", sc) ||
                  picked.back() == "supplier3->roastery1",
              "grader accepts an unrelated program for " + picked.back());
  }
  if (c.ok) {
    std::string arcs;
    for (const auto& p : picked) arcs += (arcs.empty() ? "" : " ") + p;
    c.detail = "10/10 arcs: FIX = 0 grades equal to cost 1e10 (" + arcs + ")";
  }
  return c;
}

bench::ExperimentConfig protocol_config() {
  bench::ExperimentConfig cfg;
  cfg.experiments = 2;
  cfg.questions_per_set = 10;
  cfg.shots = 3;
  cfg.seed = 11;
  return cfg;
}

Check protocol_fidelity() {
  Check c;
  const auto cfg = protocol_config();
  const agents::HashedEmbedding emb;
  auto truth = bench::truth_llm(cfg);
  const auto full = bench::evaluate(cfg, *truth, emb);
  c.require(full.sets.size() == 2 * 13, std::to_string(full.sets.size()) + " question sets");
  c.require(full.accuracy == 1.0, "truth mock AC " + format_number(full.accuracy));

  // Wrong answers for every question of one set per experiment.
  agents::ScriptedLlm corrupt(Rules{{"demand at all cafes doubled", {"FIX x[supplier1,roastery1] = 0"}}},
                              "", truth);
  const auto bad = bench::evaluate(cfg, corrupt, emb);
  const double expect = 1.0 - 1.0 / 13.0;
  c.require(std::abs(bad.accuracy - expect) <= 1e-12,
            "corrupted AC " + format_number(bad.accuracy) + ", want " + format_number(expect));
  std::size_t failed_sets = 0;
  for (const auto& s : bad.sets) failed_sets += s.pass ? 0 : 1;
  c.require(failed_sets == 2, std::to_string(failed_sets) + " failed sets");

  // Fails twice, then answers.
  const auto sets = bench::build_question_sets(cfg);
  const auto& q = sets.front().tests.front();
  agents::ScriptedLlm flaky(Rules{{std::regex_replace(q.text, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)"),
                                   {"not a program", "FIX x[nowhere,roastery1] = 0", q.program_text}}});
  const agents::Workspace ws(std::make_shared<const Scenario>(testing_support::coffee()));
  const auto a = agents::ask(q.text, ws, flaky);
  c.require(a.status == agents::AnswerStatus::Answered && a.attempts == 3,
            "retry: status " + std::string(agents::to_string(a.status)) + ", attempts " +
                std::to_string(a.attempts));
  c.require(bench::grade(q, a.program_text, testing_support::coffee()), "retry answer graded wrong");
  if (c.ok) {
    c.detail = "R=2 T=13 Q=10: AC 1 with truth mock, " + fmt(bad.accuracy, 15) +
               " with one set corrupted per run (1 - 1/13), retry answered on attempt 3";
  }
  return c;
}

Check selection_semantics() {
  Check c;
  auto cfg = protocol_config();
  const auto sets = bench::build_question_sets(cfg);
  const agents::HashedEmbedding emb;
  std::map<std::size_t, std::vector<agents::Example>> pools;
  for (const auto& s : sets) {
    for (const auto& q : s.pool) pools[s.experiment].push_back({q.id, q.type, q.text, q.program_text});
  }
  std::size_t selections = 0;
  auto check_query = [&](const agents::Example& query, std::size_t r, std::uint64_t seed) {
    for (auto mode : {agents::SelectionMode::Random, agents::SelectionMode::Nearest}) {
      for (const auto& e : agents::select_examples(pools[r], query, 5, mode,
                                                   agents::Distribution::In, seed, emb)) {
        c.require(e.type == query.type, "in-distribution picked " + e.type + " for " + query.type);
        c.require(e.id != query.id, "query instance " + query.id + " selected as its own example");
      }
      for (const auto& e : agents::select_examples(pools[r], query, 10, mode,
                                                   agents::Distribution::Out, seed, emb)) {
        c.require(e.type != query.type, "out-of-distribution picked " + e.type);
      }
      selections += 2;
    }
  };
  for (const auto& s : sets) {
    for (std::size_t i = 0; i < s.tests.size(); ++i) {
      const auto& q = s.tests[i];
      check_query({q.id, q.type, q.text, q.program_text}, s.experiment, i);
    }
  }
  // Queries drawn from the pool itself must not select themselves.
  for (const auto& [r, pool] : pools) {
    for (std::size_t i = 0; i < pool.size(); i += 7) check_query(pool[i], r, i);
  }

  auto truth = bench::truth_llm(cfg);
  std::set<std::string> reports;
  for (auto mode : {agents::SelectionMode::Random, agents::SelectionMode::Nearest}) {
    cfg.mode = mode;
    const std::string a = bench::to_json(bench::evaluate(cfg, *truth, emb));
    const std::string b = bench::to_json(bench::evaluate(cfg, *truth, emb));
    const std::string serial = bench::to_json(bench::evaluate_serial(cfg, *truth, emb));
    c.require(a == b, "seeded rerun produced a different report");
    c.require(a == serial, "serial and parallel reports differ");
    reports.insert(a);
  }
  c.require(reports.size() == 2, "random and nearest reports are identical");
  if (c.ok) {
    c.detail = std::to_string(selections) +
               " selections respect type and identity; seeded reruns are byte-identical";
  }
  return c;
}

Check table_shape() {
  Check c;
  auto configs = bench::parse_sweep(R"({
    "experiments": 1, "questions_per_set": 2, "pool_per_set": 10, "seed": 3,
    "shots": [0, 1, 3, 5, 10], "modes": ["random", "nearest"], "distributions": ["in", "out"]
  })");
  c.require(configs.size() == 20, std::to_string(configs.size()) + " configurations");
  const agents::HashedEmbedding emb;
  auto truth = bench::truth_llm(configs.front());
  std::vector<bench::EvalReport> reports;
  for (const auto& cfg : configs) reports.push_back(bench::evaluate(cfg, *truth, emb));
  const std::string csv = bench::to_csv(reports);
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  c.require(rows == 21, std::to_string(rows) + " CSV lines");
  const auto j = nlohmann::json::parse(bench::to_json(reports));
  c.require(j["reports"].size() == 20, "JSON report count");
  if (c.ok) {
    c.detail = "not reproducible here (needs live proprietary models); the harness emits the "
               "shots x mode x distribution table (20 rows) and asserts no live accuracies";
  }
  return c;
}

}  // namespace

int main() {
  report("coffee-baseline", coffee_baseline);
  report("exclusive-what-if", exclusive_whatif);
  report("solver-oracle-suite", solver_oracle);
  report("macro-coverage", macro_coverage);
  report("equivalent-program-grading", equivalent_grading);
  report("protocol-fidelity", protocol_fidelity);
  report("selection-semantics", selection_semantics);
  report("live-accuracy-table", table_shape);
  return failures;
}
