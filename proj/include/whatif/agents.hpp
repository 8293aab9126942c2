#pragma once

// Coder -> LLM -> safeguard -> solver -> interpreter.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "whatif/dsl.hpp"
#include "whatif/scenario.hpp"
#include "whatif/solver.hpp"

namespace whatif::agents {

// --- clients ---------------------------------------------------------------

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt, int max_tokens = 1024,
                               double temperature = 0.0) = 0;
  // Only live clients can paraphrase or write free-form answers.
  virtual bool live() const { return false; }
};

// Marker that starts every error-feedback block in a retry prompt. Mocks count
// these to know which attempt they are answering.
inline constexpr std::string_view kFeedbackMarker = "### ERROR FEEDBACK";

// The question a coder prompt asks, or the whole prompt if it is not one.
std::string query_of(const std::string& prompt);
std::size_t attempt_of(const std::string& prompt);

// Replies by regex on the query. `responses[i]` answers attempt i; the last
// one repeats. Unmatched queries go to the fallback, or get `default_reply`.
class ScriptedLlm : public LlmClient {
 public:
  struct Rule {
    std::string pattern;
    std::vector<std::string> responses;
  };

  ScriptedLlm(std::vector<Rule> rules, std::string default_reply = {},
              std::shared_ptr<LlmClient> fallback = nullptr);

  // {"rules": [{"match": "...", "responses": ["...", ...]}], "default": "..."}
  static std::shared_ptr<ScriptedLlm> from_json(std::string_view json_text,
                                                std::shared_ptr<LlmClient> fallback = nullptr);
  static std::shared_ptr<ScriptedLlm> load(const std::string& path,
                                           std::shared_ptr<LlmClient> fallback = nullptr);

  std::string complete(const std::string& prompt, int max_tokens = 1024,
                       double temperature = 0.0) override;

 private:
  std::vector<Rule> rules_;
  std::vector<std::regex> compiled_;
  std::string default_reply_;
  std::shared_ptr<LlmClient> fallback_;
};

// Answers every known question with its ground-truth program.
class TruthLlm : public LlmClient {
 public:
  void add(std::string question, std::string program);
  std::size_t size() const { return answers_.size(); }
  std::string complete(const std::string& prompt, int max_tokens = 1024,
                       double temperature = 0.0) override;

 private:
  std::map<std::string, std::string, std::less<>> answers_;
};

// Chat-completion endpoint. Configuration from the environment:
// WHATIF_LLM_URL, WHATIF_LLM_KEY, WHATIF_LLM_MODEL, WHATIF_LLM_TIMEOUT (s).
class LiveLlm : public LlmClient {
 public:
  struct Config {
    std::string url;
    std::string key;
    std::string model = "gpt-4";
    int timeout_s = 60;
  };
  static Config config_from_env();

  explicit LiveLlm(Config config, std::ostream* log = nullptr);
  std::string complete(const std::string& prompt, int max_tokens = 1024,
                       double temperature = 0.0) override;
  bool live() const override { return true; }

 private:
  Config config_;
  std::ostream* log_;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<float> embed(const std::string& text) const = 0;
};

// Lowercase alphanumeric word tokens, FNV-1a hashed into `dim` buckets.
class HashedEmbedding : public EmbeddingClient {
 public:
  explicit HashedEmbedding(std::size_t dim = 256) : dim_(dim) {}
  std::vector<float> embed(const std::string& text) const override;

 private:
  std::size_t dim_;
};

double cosine(const std::vector<float>& a, const std::vector<float>& b);

// Cosine of `query` against every row; OpenMP-parallel over rows.
std::vector<double> similarity_scores(const std::vector<float>& query,
                                      const std::vector<std::vector<float>>& rows);
// Serial reference for the above.
std::vector<double> similarity_scores_serial(const std::vector<float>& query,
                                             const std::vector<std::vector<float>>& rows);

// --- example selection -----------------------------------------------------

struct Example {
  std::string id;    // instance identity
  std::string type;  // question-set type tag
  std::string question;
  std::string program;
};

enum class SelectionMode { Random, Nearest };
enum class Distribution { In, Out, Any };

std::string_view to_string(SelectionMode m);
std::string_view to_string(Distribution d);
SelectionMode parse_selection_mode(std::string_view s);
Distribution parse_distribution(std::string_view s);

// In: same type, never the query instance. Out: different type only.
// Any: every pool item except the query instance.
// Throws Error(PoolExhausted) when fewer than k items are eligible.
std::vector<Example> select_examples(const std::vector<Example>& pool, const Example& query,
                                     std::size_t k, SelectionMode mode, Distribution distribution,
                                     std::uint64_t seed, const EmbeddingClient& embedder);

// --- coder -----------------------------------------------------------------

struct PromptBundle {
  std::string preamble;
  std::vector<Example> examples;
  std::string query;
  std::size_t char_budget = 0;

  std::string render() const;
};

inline constexpr std::size_t kDefaultCharBudget = 16000;

// Scenario context without any parameter values: description, entity names,
// variable families, parameter names and the edit-language cheat sheet.
std::string preamble(const Scenario& scenario);

// Drops examples from the end until the rendered bundle fits.
// Throws Error(BudgetTooSmall) if even the bare preamble + query do not.
PromptBundle coder(const std::string& question, const Scenario& scenario,
                   std::vector<Example> examples, std::size_t char_budget = kDefaultCharBudget);

// --- session state ---------------------------------------------------------

// A scenario plus the what-if edits committed so far, and the plan they give.
class Workspace {
 public:
  explicit Workspace(std::shared_ptr<const Scenario> scenario);

  const Scenario& scenario() const { return *scenario_; }
  const dsl::EditProgram& committed() const { return committed_; }
  const Model& model() const { return model_; }
  const SolveResult& baseline() const { return baseline_; }

  // Validates `program` alone, then applies committed + program.
  dsl::AppliedEdit what_if(const dsl::EditProgram& program) const;
  void commit(const dsl::EditProgram& program, Model model, SolveResult result);

 private:
  std::shared_ptr<const Scenario> scenario_;
  dsl::EditProgram committed_;
  Model model_;
  SolveResult baseline_;
};

// --- ask -------------------------------------------------------------------

enum class AnswerStatus { Answered, Denied, Failed };
std::string_view to_string(AnswerStatus s);

struct AttemptLog {
  std::string prompt;
  std::string response;
  std::string program;
  std::string error;  // empty on success
};

struct ArcChange {
  std::string from;
  std::string to;
  std::string label;
  double before = 0.0;
  double after = 0.0;
};

struct AnswerReport {
  AnswerStatus status = AnswerStatus::Failed;
  std::optional<ErrorKind> error_kind;
  std::string error;
  std::string question;
  SolveStatus solve_status = SolveStatus::Infeasible;  // of the what-if, when answered
  std::optional<double> baseline_objective;
  std::optional<double> whatif_objective;
  std::optional<double> delta_abs;
  std::optional<double> delta_pct;  // percent: 100 * (whatif - baseline) / baseline
  std::vector<ArcChange> plan_diff;
  std::size_t attempts = 0;
  dsl::EditProgram program;
  std::string program_text;
  std::string narrative;
  std::vector<AttemptLog> log;

  // Present only when answered; lets callers commit without re-solving.
  std::shared_ptr<const Model> model;
  std::optional<Assignment> assignment;
};

enum class InterpretMode { Template, Live };

struct AskConfig {
  std::vector<Example> examples;
  std::size_t char_budget = kDefaultCharBudget;
  std::size_t max_attempts = 3;
  InterpretMode interpret = InterpretMode::Template;
  SolverConfig solver;
};

// Denied questions and programs stop at once; other failures are fed back to
// the LLM for up to `max_attempts` attempts.
AnswerReport ask(const std::string& question, const Workspace& workspace, LlmClient& llm,
                 const AskConfig& config = {});

// Throws Error(LlmUnavailable) for Live mode without a live client.
std::string interpret(const AnswerReport& report, LlmClient* llm = nullptr,
                      InterpretMode mode = InterpretMode::Template);

std::vector<ArcChange> plan_diff(const PlanGraph& before, const PlanGraph& after);

}  // namespace whatif::agents
