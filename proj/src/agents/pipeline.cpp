#include <cmath>
#include <cstdio>
#include <map>

#include "whatif/agents.hpp"

namespace whatif::agents {

// --- Workspace -----------------------------------------------------------------

Workspace::Workspace(std::shared_ptr<const Scenario> scenario)
    : scenario_(std::move(scenario)), model_(scenario_->build()), baseline_(scenario_->baseline) {}

dsl::AppliedEdit Workspace::what_if(const dsl::EditProgram& program) const {
  return dsl::apply_on(committed_, program, *scenario_);
}

void Workspace::commit(const dsl::EditProgram& program, Model model, SolveResult result) {
  committed_ = dsl::concat(committed_, program);
  model_ = std::move(model);
  baseline_ = std::move(result);
}

std::string_view to_string(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::Answered: return "answered";
    case AnswerStatus::Denied: return "denied";
    case AnswerStatus::Failed: return "failed";
  }
  return "?";
}

// --- plan diff -------------------------------------------------------------------

std::vector<ArcChange> plan_diff(const PlanGraph& before, const PlanGraph& after) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::pair<double, double>> flows;
  for (const auto& a : before.arcs) {
    for (const auto& f : a.flows) flows[{a.from, a.to, f.label}].first += f.quantity;
  }
  for (const auto& a : after.arcs) {
    for (const auto& f : a.flows) flows[{a.from, a.to, f.label}].second += f.quantity;
  }
  std::vector<ArcChange> out;
  for (const auto& [key, q] : flows) {
    if (std::abs(q.first - q.second) <= 1e-9) continue;
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), q.first, q.second});
  }
  return out;
}

// --- ask -------------------------------------------------------------------------

namespace {

// The program inside the first ``` fence, or the whole reply.
std::string extract_program(const std::string& reply) {
  std::string text = reply;
  const auto open = text.find("```");
  if (open != std::string::npos) {
    auto body = text.find('\n', open);
    body = body == std::string::npos ? text.size() : body + 1;
    const auto close = text.find("```", body);
    text = text.substr(body, close == std::string::npos ? std::string::npos : close - body);
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text.compare(first, 8, "PROGRAM:") == 0) {
    text = text.substr(first + 8);
  }
  return text;
}

std::string feedback_block(std::size_t attempt, const std::string& program,
                           const std::string& error) {
  return std::string(kFeedbackMarker) + " (attempt " + std::to_string(attempt) + ")\n" +
         "Previous program:\n" + program + (program.empty() || program.back() != '\n' ? "\n" : "") +
         "Error: " + error + "\n" +
         "Fix the program and answer with the corrected program only.\n";
}

std::string amount(double v) {
  if (std::abs(v - std::round(v)) < 1e-6) return format_number(std::round(v) + 0.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string about_percent(double pct) {
  const long r = std::lround(std::abs(pct));
  if (r == 0) return "less than 1%";
  return "≈ " + std::to_string(r) + "%";
}

constexpr std::string_view kCommitQuestion =
    "Would you like to implement this change for future planning purposes?";

}  // namespace

AnswerReport ask(const std::string& question, const Workspace& workspace, LlmClient& llm,
                 const AskConfig& config) {
  AnswerReport r;
  r.question = question;
  const Scenario& sc = workspace.scenario();
  const SolveResult& base = workspace.baseline();
  if (base.optimal()) r.baseline_objective = base.objective;

  auto finish = [&]() -> AnswerReport {
    r.attempts = r.log.size();
    r.narrative = interpret(r, &llm, config.interpret);
    return std::move(r);
  };

  if (const auto word = dsl::find_denied_keyword(question, sc); !word.empty()) {
    r.status = AnswerStatus::Denied;
    r.error_kind = ErrorKind::SensitiveDataDenied;
    r.error = "question mentions '" + word + "': " + std::string(dsl::kApprovalRequired);
    return finish();
  }

  std::string feedback;
  std::string last_error;
  const std::size_t attempts = std::min<std::size_t>(config.max_attempts, 3);
  for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
    AttemptLog log;
    try {
      if (feedback.size() >= config.char_budget) {
        throw Error(ErrorKind::BudgetTooSmall, "error feedback exceeds the prompt budget");
      }
      const PromptBundle bundle =
          coder(question, sc, config.examples, config.char_budget - feedback.size());
      log.prompt = bundle.render() + feedback;
      log.response = llm.complete(log.prompt, 1024, 0.0);
      log.program = extract_program(log.response);

      dsl::EditProgram program = dsl::parse(log.program);
      for (const auto& v : dsl::validate(program, sc)) {
        if (v.kind == ErrorKind::SensitiveDataDenied) {
          r.log.push_back(log);
          r.status = AnswerStatus::Denied;
          r.error_kind = v.kind;
          r.error = v.message;
          r.program = std::move(program);
          r.program_text = dsl::render(r.program);
          return finish();
        }
      }
      dsl::AppliedEdit applied = workspace.what_if(program);
      SolveResult result = solve(applied.model, config.solver);
      if (result.status == SolveStatus::NodeLimit) {
        throw Error(ErrorKind::NodeLimitExceeded, "the solver hit its node limit");
      }

      r.log.push_back(log);
      r.status = AnswerStatus::Answered;
      r.solve_status = result.status;
      r.program = std::move(program);
      r.program_text = dsl::render(r.program);
      if (result.optimal()) {
        r.whatif_objective = result.objective;
        if (r.baseline_objective) {
          r.delta_abs = *result.objective - *r.baseline_objective;
          if (*r.baseline_objective != 0.0) {
            r.delta_pct = 100.0 * *r.delta_abs / *r.baseline_objective;
          }
          r.plan_diff = plan_diff(plan_view(sc, workspace.model(), *base.assignment),
                                  plan_view(sc, applied.model, *result.assignment));
        }
        r.assignment = result.assignment;
      }
      r.model = std::make_shared<const Model>(std::move(applied.model));
      return finish();
    } catch (const Error& e) {
      log.error = e.what();
      last_error = e.what();
      r.error_kind = e.kind();
      r.log.push_back(log);
      feedback += feedback_block(attempt, log.program.empty() ? log.response : log.program,
                                 e.what());
    }
  }
  r.status = AnswerStatus::Failed;
  r.error_kind = ErrorKind::RetriesExhausted;
  r.error = "no usable program after " + std::to_string(r.log.size()) +
            " attempts; last error: " + last_error;
  return finish();
}

// --- interpret -------------------------------------------------------------------

std::string interpret(const AnswerReport& r, LlmClient* llm, InterpretMode mode) {
  if (mode == InterpretMode::Live) {
    if (llm == nullptr || !llm->live()) {
      throw Error(ErrorKind::LlmUnavailable, "live interpretation needs a live LLM");
    }
    std::string prompt =
        "You explain the outcome of a what-if analysis to a planner. Answer the planner's "
        "question in a few plain sentences, quote the costs, and do not invent numbers.\n\n";
    prompt += "Planner question: " + r.question + "\n";
    prompt += "Status: " + std::string(to_string(r.status)) + "\n";
    if (!r.error.empty()) prompt += "Problem: " + r.error + "\n";
    if (!r.program_text.empty()) prompt += "Change applied to the model:\n" + r.program_text;
    if (r.status == AnswerStatus::Answered) {
      prompt += "Solver status: " + std::string(to_string(r.solve_status)) + "\n";
    }
    if (r.baseline_objective) prompt += "Current plan cost: " + amount(*r.baseline_objective) + "\n";
    if (r.whatif_objective) prompt += "Cost with the change: " + amount(*r.whatif_objective) + "\n";
    if (r.delta_pct) prompt += "Relative change: " + amount(*r.delta_pct) + "%\n";
    for (const auto& c : r.plan_diff) {
      prompt += "Flow " + c.from + " -> " + c.to + (c.label.empty() ? "" : " (" + c.label + ")") +
                ": " + amount(c.before) + " -> " + amount(c.after) + "\n";
    }
    if (r.whatif_objective) {
      prompt += "\nEnd by asking: \"" + std::string(kCommitQuestion) + "\"\n";
    }
    return llm->complete(prompt, 512, 0.0);
  }

  switch (r.status) {
    case AnswerStatus::Denied:
      return "I cannot run this analysis: it involves " + std::string(dsl::kApprovalRequired);
    case AnswerStatus::Failed:
      return "I could not turn this question into a valid change to the model (" +
             std::to_string(r.attempts) + " attempts). Last error: " + r.error;
    case AnswerStatus::Answered: break;
  }
  const std::string current =
      r.baseline_objective ? " The current plan, costing " + amount(*r.baseline_objective) +
                                 ", stays in place."
                           : "";
  if (r.solve_status == SolveStatus::Infeasible) {
    return "This change cannot be satisfied: no plan meets every requirement once it is "
           "applied." + current;
  }
  if (r.solve_status == SolveStatus::Unbounded) {
    return "With this change the model has no finite optimum, so the change is not usable "
           "as stated." + current;
  }
  if (!r.whatif_objective) return "The solver did not return a plan for this change." + current;
  const std::string whatif = amount(*r.whatif_objective);
  if (!r.baseline_objective) {
    return "With this change the total cost would be " + whatif + ". " +
           std::string(kCommitQuestion);
  }
  const double base = *r.baseline_objective;
  const double delta = *r.delta_abs;
  if (std::abs(delta) <= 1e-9 * std::max(1.0, std::abs(base))) {
    return "The cost does not change: the plan still costs " + amount(base) + ". " +
           std::string(kCommitQuestion);
  }
  std::string text = "With this change the total cost would be " + whatif + ", compared with " +
                     amount(base) + " for the current plan: " +
                     (delta > 0 ? "an increase of " : "a decrease of ") + amount(std::abs(delta));
  if (r.delta_pct) text += " (" + about_percent(*r.delta_pct) + ")";
  text += ". ";
  if (!r.plan_diff.empty()) {
    text += std::to_string(r.plan_diff.size()) +
            (r.plan_diff.size() == 1 ? " flow changes. " : " flows change. ");
  }
  return text + std::string(kCommitQuestion);
}

}  // namespace whatif::agents
