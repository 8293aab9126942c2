#pragma once

// Macro-generated question sets and the accuracy protocol.
//
// A macro file holds blocks separated by blank lines:
//
//   NAME: supplier-capacity              (question-set id, defaults to TYPE)
//   QUESTION: What if supplier {{VALUE-S}} ...
//   VALUE-S: choice(supplier)            (generators, evaluated in order)
//   DATA:                                (edit-language lines)
//   CONSTRAINT:                          (edit-language lines)
//   TYPE: supplier-capacity
//
// Generator expressions:
//   choice(kind) | choice(VALUE-L) | choice(a, b, ...)   uniform pick
//   other(kind, VALUE-X | name)                          pick from kind except one
//   int(lo, hi)                                          integer in [lo, hi)
//   len(VALUE-L)                                         list length
//   active(family)      index tuples with baseline value >= 0.999
//   percent_factor(VALUE-N)                              1 + N / 100
//   VALUE-L[i][j]                                        list / tuple indexing

#include <cstdint>
#include <string>
#include <vector>

#include "whatif/agents.hpp"
#include "whatif/dsl.hpp"
#include "whatif/scenario.hpp"
#include "whatif/solver.hpp"

namespace whatif::bench {

struct Macro {
  std::string name;
  std::string type;
  std::string question;
  std::vector<std::pair<std::string, std::string>> values;  // VALUE-X -> generator
  std::string data;
  std::string constraint;
  std::size_t line = 0;
};

// Throws Error(DataFormat) with the offending line.
std::vector<Macro> parse_macros(std::string_view text);
std::vector<Macro> load_macros(const std::string& scenario_id,
                               const std::string& data_dir = default_data_dir());

struct QuestionInstance {
  std::string id;  // "<macro>#<n>", unique within one expansion
  std::string macro;
  std::string type;
  std::string text;
  std::string program_text;
  dsl::EditProgram ground_truth;
  std::string seed_trace;  // generated values, for reproducing a question by hand
};

// Deterministic for (macro, scenario, baseline, count, seed). Every instance
// validates against the scenario. Throws Error(GeneratorError).
std::vector<QuestionInstance> expand(const Macro& macro, const Scenario& scenario,
                                     const SolveResult& baseline, std::size_t count,
                                     std::uint64_t seed);

// Live LLM only: new text, same ground truth. Throws Error(LlmUnavailable).
QuestionInstance rephrase(const QuestionInstance& q, agents::LlmClient& llm);

// --- grading ---------------------------------------------------------------

struct Outcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<double> objective;
};

Outcome outcome(const dsl::EditProgram& program, const Scenario& scenario,
                const SolverConfig& solver = {});

// Same status, and objectives within `tol` relative when optimal.
bool same_outcome(const Outcome& a, const Outcome& b, double tol = 1e-6);

// Invalid or unparsable LLM programs fail.
bool grade(const QuestionInstance& question, const std::string& llm_program,
           const Scenario& scenario, double tol = 1e-6);

// --- protocol --------------------------------------------------------------

struct ExperimentConfig {
  std::vector<std::string> scenarios{"coffee"};
  std::size_t experiments = 10;        // R
  std::size_t question_sets = 0;       // T_s, first T macros; 0 = all of them
  std::size_t questions_per_set = 10;  // Q
  std::size_t pool_per_set = 10;       // ICL examples drawn alongside each set
  std::size_t shots = 0;
  agents::SelectionMode mode = agents::SelectionMode::Random;
  agents::Distribution distribution = agents::Distribution::In;
  std::uint64_t seed = 1;
  std::size_t char_budget = agents::kDefaultCharBudget;
  double tol = 1e-6;
  std::string data_dir;  // empty = default_data_dir()
};

struct QuestionSet {
  std::size_t scenario = 0;  // index into config.scenarios
  std::size_t experiment = 0;
  std::size_t index = 0;
  std::string macro;
  std::string type;
  std::vector<QuestionInstance> tests;
  std::vector<QuestionInstance> pool;
};

// Every question set of the protocol, in (scenario, experiment, set) order.
std::vector<QuestionSet> build_question_sets(const ExperimentConfig& config);

struct QuestionGrade {
  std::string id;
  std::string question;
  std::string truth;
  std::string answer;
  std::string status;
  bool pass = false;
  std::size_t attempts = 0;
};

struct SetResult {
  std::string scenario;
  std::size_t experiment = 0;
  std::size_t index = 0;
  std::string macro;
  std::string type;
  bool pass = false;
  std::vector<QuestionGrade> questions;
};

struct EvalReport {
  ExperimentConfig config;
  std::vector<SetResult> sets;
  double accuracy = 0.0;
};

// AC = 1/(S R) sum_s sum_r 1/T_s sum_t pass[s][r][t].
double accuracy(const std::vector<std::vector<std::vector<bool>>>& pass);

// Question sets run in parallel (OpenMP); results do not depend on the
// thread count. The LLM client must tolerate concurrent calls.
EvalReport evaluate(const ExperimentConfig& config, agents::LlmClient& llm,
                    const agents::EmbeddingClient& embedder);
// Serial reference for the above.
EvalReport evaluate_serial(const ExperimentConfig& config, agents::LlmClient& llm,
                           const agents::EmbeddingClient& embedder);

// Mock that answers every question of the protocol with its ground truth.
std::shared_ptr<agents::TruthLlm> truth_llm(const ExperimentConfig& config);

std::string to_json(const EvalReport& report);
std::string to_json(const std::vector<EvalReport>& reports);
// One row per report: shots,mode,distribution,accuracy.
std::string to_csv(const std::vector<EvalReport>& reports);

enum class ReportFormat { Json, Csv };
void export_report(const std::vector<EvalReport>& reports, ReportFormat format,
                   const std::string& path);

// Parses a sweep file; see docs/formats.md. Each (shots, mode, distribution)
// combination becomes one ExperimentConfig.
std::vector<ExperimentConfig> load_sweep(const std::string& path);
std::vector<ExperimentConfig> parse_sweep(std::string_view json_text);

}  // namespace whatif::bench
