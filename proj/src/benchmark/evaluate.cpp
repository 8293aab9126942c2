#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "whatif/benchmark.hpp"

namespace whatif::bench {

using json = nlohmann::ordered_json;

// --- grading ---------------------------------------------------------------------

Outcome outcome(const dsl::EditProgram& program, const Scenario& scenario,
                const SolverConfig& solver) {
  const auto r = solve(dsl::apply(program, scenario).model, solver);
  return {r.status, r.objective};
}

bool same_outcome(const Outcome& a, const Outcome& b, double tol) {
  if (a.status != b.status) return false;
  if (a.status != SolveStatus::Optimal) return true;
  if (!a.objective || !b.objective) return false;
  const double scale = std::max({1.0, std::abs(*a.objective), std::abs(*b.objective)});
  return std::abs(*a.objective - *b.objective) <= tol * scale;
}

bool grade(const QuestionInstance& question, const std::string& llm_program,
           const Scenario& scenario, double tol) {
  Outcome answer;
  try {
    answer = outcome(dsl::parse(llm_program), scenario);
  } catch (const Error&) {
    return false;
  }
  return same_outcome(answer, outcome(question.ground_truth, scenario), tol);
}

// --- protocol --------------------------------------------------------------------

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running hash
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t seed_for(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix(0, seed);
  for (auto p : parts) h = mix(h, p);
  return h;
}

std::string data_dir(const ExperimentConfig& c) {
  return c.data_dir.empty() ? std::string(default_data_dir()) : c.data_dir;
}

void check_config(const ExperimentConfig& c) {
  if (c.scenarios.empty()) throw Error(ErrorKind::DataFormat, "no scenarios configured");
  if (c.experiments == 0 || c.questions_per_set == 0) {
    throw Error(ErrorKind::DataFormat, "experiments and questions_per_set must be at least 1");
  }
}

using Scenarios = std::vector<std::shared_ptr<const Scenario>>;

Scenarios load_all(const ExperimentConfig& c) {
  Scenarios out;
  for (const auto& id : c.scenarios) {
    out.push_back(std::make_shared<const Scenario>(load_scenario(id, data_dir(c))));
  }
  return out;
}

std::vector<QuestionSet> build_sets(const ExperimentConfig& c, const Scenarios& scenarios) {
  check_config(c);
  std::vector<QuestionSet> out;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Scenario& sc = *scenarios[s];
    const auto macros = load_macros(sc.id, data_dir(c));
    const std::size_t sets =
        c.question_sets == 0 ? macros.size() : std::min(c.question_sets, macros.size());
    for (std::size_t r = 0; r < c.experiments; ++r) {
      for (std::size_t t = 0; t < sets; ++t) {
        auto all = expand(macros[t], sc, sc.baseline, c.questions_per_set + c.pool_per_set,
                          seed_for(c.seed, {s, r, t}));
        QuestionSet q{s, r, t, macros[t].name, macros[t].type, {}, {}};
        const auto split = all.begin() + static_cast<std::ptrdiff_t>(c.questions_per_set);
        q.tests.assign(all.begin(), split);
        q.pool.assign(split, all.end());
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

agents::Example as_example(const QuestionInstance& q) {
  return {q.id, q.type, q.text, q.program_text};
}

EvalReport run(const ExperimentConfig& c, agents::LlmClient& llm,
               const agents::EmbeddingClient& embedder, bool parallel) {
  const Scenarios scenarios = load_all(c);
  const auto sets = build_sets(c, scenarios);

  // Examples for a question come from the pools of every set of the same
  // scenario and experiment; the distribution filter does the rest.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<agents::Example>> pools;
  for (const auto& set : sets) {
    auto& pool = pools[{set.scenario, set.experiment}];
    for (const auto& q : set.pool) pool.push_back(as_example(q));
  }

  std::vector<SetResult> results(sets.size());
  std::vector<std::exception_ptr> errors(sets.size());

  auto run_set = [&](std::size_t i) {
    try {
      const QuestionSet& set = sets[i];
      const auto& sc = scenarios[set.scenario];
      const agents::Workspace ws(sc);
      const auto& pool = pools.at({set.scenario, set.experiment});
      SetResult res{sc->id, set.experiment, set.index, set.macro, set.type, true, {}};
      for (std::size_t qi = 0; qi < set.tests.size(); ++qi) {
        const QuestionInstance& q = set.tests[qi];
        agents::AskConfig cfg;
        cfg.char_budget = c.char_budget;
        cfg.examples = agents::select_examples(
            pool, as_example(q), c.shots, c.mode, c.distribution,
            seed_for(c.seed, {set.scenario, set.experiment, set.index, qi, 0x5e1ec7}), embedder);
        const auto report = agents::ask(q.text, ws, llm, cfg);
        const Outcome truth = outcome(q.ground_truth, *sc);
        const bool pass = report.status == agents::AnswerStatus::Answered &&
                          same_outcome({report.solve_status, report.whatif_objective}, truth,
                                       c.tol);
        std::string status(to_string(report.status));
        if (report.status == agents::AnswerStatus::Answered) {
          status = std::string(to_string(report.solve_status));
        }
        res.questions.push_back({q.id, q.text, q.program_text, report.program_text, status, pass,
                                 report.attempts});
        res.pass = res.pass && pass;
      }
      results[i] = std::move(res);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(sets.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) run_set(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run_set(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::vector<std::vector<bool>>> pass(scenarios.size(),
                                                   std::vector<std::vector<bool>>(c.experiments));
  for (const auto& set : sets) {
    pass[set.scenario][set.experiment].push_back(false);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    pass[sets[i].scenario][sets[i].experiment][sets[i].index] = results[i].pass;
  }
  return {c, std::move(results), accuracy(pass)};
}

}  // namespace

std::vector<QuestionSet> build_question_sets(const ExperimentConfig& config) {
  return build_sets(config, load_all(config));
}

double accuracy(const std::vector<std::vector<std::vector<bool>>>& pass) {
  if (pass.empty()) return 0.0;
  double total = 0.0;
  std::size_t runs = 0;
  for (const auto& by_experiment : pass) {
    for (const auto& sets : by_experiment) {
      ++runs;
      if (sets.empty()) continue;
      std::size_t passed = 0;
      for (bool p : sets) passed += p ? 1 : 0;
      total += static_cast<double>(passed) / static_cast<double>(sets.size());
    }
  }
  return runs == 0 ? 0.0 : total / static_cast<double>(runs);
}

EvalReport evaluate(const ExperimentConfig& config, agents::LlmClient& llm,
                    const agents::EmbeddingClient& embedder) {
  return run(config, llm, embedder, true);
}

EvalReport evaluate_serial(const ExperimentConfig& config, agents::LlmClient& llm,
                           const agents::EmbeddingClient& embedder) {
  return run(config, llm, embedder, false);
}

std::shared_ptr<agents::TruthLlm> truth_llm(const ExperimentConfig& config) {
  auto llm = std::make_shared<agents::TruthLlm>();
  for (const auto& set : build_question_sets(config)) {
    for (const auto& q : set.tests) llm->add(q.text, q.program_text);
    for (const auto& q : set.pool) llm->add(q.text, q.program_text);
  }
  return llm;
}

// --- reports ---------------------------------------------------------------------

namespace {

json config_json(const ExperimentConfig& c) {
  return {
      {"scenarios", c.scenarios},
      {"experiments", c.experiments},
      {"question_sets", c.question_sets},
      {"questions_per_set", c.questions_per_set},
      {"pool_per_set", c.pool_per_set},
      {"shots", c.shots},
      {"mode", std::string(agents::to_string(c.mode))},
      {"distribution", std::string(agents::to_string(c.distribution))},
      {"seed", c.seed},
      {"char_budget", c.char_budget},
      {"tolerance", c.tol},
  };
}

json report_json(const EvalReport& r) {
  json sets = json::array();
  for (const auto& s : r.sets) {
    json qs = json::array();
    for (const auto& q : s.questions) {
      qs.push_back({{"id", q.id},
                    {"question", q.question},
                    {"truth", q.truth},
                    {"answer", q.answer},
                    {"status", q.status},
                    {"pass", q.pass},
                    {"attempts", q.attempts}});
    }
    sets.push_back({{"scenario", s.scenario},
                    {"experiment", s.experiment},
                    {"set", s.index},
                    {"macro", s.macro},
                    {"type", s.type},
                    {"pass", s.pass},
                    {"questions", std::move(qs)}});
  }
  return {{"config", config_json(r.config)}, {"accuracy", r.accuracy}, {"sets", std::move(sets)}};
}

}  // namespace

std::string to_json(const EvalReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_json(const std::vector<EvalReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return json{{"reports", std::move(arr)}}.dump(2) + "\n";
}

std::string to_csv(const std::vector<EvalReport>& reports) {
  std::string out = "shots,mode,distribution,accuracy\n";
  for (const auto& r : reports) {
    out += std::to_string(r.config.shots) + "," + std::string(agents::to_string(r.config.mode)) +
           "," + std::string(agents::to_string(r.config.distribution)) + "," +
           json(r.accuracy).dump() + "\n";
  }
  return out;
}

void export_report(const std::vector<EvalReport>& reports, ReportFormat format,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << (format == ReportFormat::Json ? to_json(reports) : to_csv(reports));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path);
}

// --- sweep files -----------------------------------------------------------------

std::vector<ExperimentConfig> parse_sweep(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::DataFormat, std::string("sweep config: ") + e.what());
  }
  auto list = [&](const char* key, json fallback) {
    json v = j.contains(key) ? j.at(key) : fallback;
    return v.is_array() ? v : json::array({v});
  };
  try {
    ExperimentConfig base;
    if (j.contains("scenarios")) base.scenarios = list("scenarios", {}).get<std::vector<std::string>>();
    base.experiments = j.value("experiments", base.experiments);
    base.question_sets = j.value("question_sets", base.question_sets);
    base.questions_per_set = j.value("questions_per_set", base.questions_per_set);
    base.pool_per_set = j.value("pool_per_set", base.pool_per_set);
    base.seed = j.value("seed", base.seed);
    base.char_budget = j.value("char_budget", base.char_budget);
    base.tol = j.value("tolerance", base.tol);
    base.data_dir = j.value("data_dir", base.data_dir);
    check_config(base);

    std::vector<ExperimentConfig> out;
    for (const auto& mode : list("modes", "random")) {
      for (const auto& dist : list("distributions", "in")) {
        for (const auto& shots : list("shots", 0)) {
          ExperimentConfig c = base;
          c.mode = agents::parse_selection_mode(mode.get<std::string>());
          c.distribution = agents::parse_distribution(dist.get<std::string>());
          c.shots = shots.get<std::size_t>();
          out.push_back(std::move(c));
        }
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::DataFormat, std::string("sweep config: ") + e.what());
  }
}

std::vector<ExperimentConfig> load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep(ss.str());
}

}  // namespace whatif::bench
