#include <algorithm>
#include <cmath>
#include <ostream>

#include "whatif/simplex.hpp"
#include "whatif/solver.hpp"

namespace whatif {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

lp::Options lp_options(const SolverConfig& config) {
  lp::Options o;
  o.feasibility_tol = config.feasibility_tol;
  return o;
}

// Snaps integral columns that are within tolerance of an integer.
Assignment to_assignment(const Model& model, const std::vector<double>& x, double int_tol) {
  Assignment a(x);
  for (VarId v = 0; v < model.num_vars(); ++v) {
    if (!model.is_integral(v)) continue;
    const double r = std::round(x[v]);
    if (std::abs(x[v] - r) <= int_tol) a.at(v) = r == 0.0 ? 0.0 : r;
  }
  return a;
}

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t depth = 0;
};

}  // namespace

SolveResult solve_lp(const Model& model, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveResult result;
  const lp::Problem problem = lp::from_model(model);
  const lp::Solution sol = lp::solve(problem, lp_options(config));
  result.nodes_explored = 1;
  result.lp_iterations = sol.iterations;
  switch (sol.status) {
    case lp::Status::Optimal: {
      result.status = SolveStatus::Optimal;
      Assignment a(sol.x);
      result.objective = evaluate(model.objective(), a);
      result.assignment = std::move(a);
      break;
    }
    case lp::Status::Infeasible: result.status = SolveStatus::Infeasible; break;
    case lp::Status::Unbounded: result.status = SolveStatus::Unbounded; break;
  }
  result.solve_time = Clock::now() - start;
  return result;
}

SolveResult solve(const Model& model, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveResult result;
  lp::Problem problem = lp::from_model(model);
  const lp::Options options = lp_options(config);
  const double sign = model.sense() == ObjectiveSense::Minimize ? 1.0 : -1.0;

  // Rows over integer columns with integer coefficients have integer
  // activity, so fractional right-hand sides can be rounded inward. Without
  // this, a demand of 23.2 sends the floor-first dive through hundreds of
  // levels before the first incumbent.
  for (std::size_t i = 0; i < problem.rows; ++i) {
    const Constraint& c = model.constraints()[i];
    bool integer_row = true;
    for (const auto& t : c.lhs.terms()) {
      integer_row = integer_row && model.is_integral(t.var) &&
                    std::abs(t.coef - std::round(t.coef)) <= 1e-9;
    }
    if (!integer_row) continue;
    double& rhs = problem.rhs[i];
    const double tol = config.feasibility_tol;
    if (std::abs(rhs - std::round(rhs)) <= tol) continue;
    if (c.sense == Sense::GreaterEqual) {
      rhs = std::ceil(rhs);
    } else if (c.sense == Sense::LessEqual) {
      rhs = std::floor(rhs);
    } else {
      result.status = SolveStatus::Infeasible;
      result.solve_time = Clock::now() - start;
      return result;
    }
  }

  std::vector<VarId> integral;
  Node root{problem.lower, problem.upper, 0};
  for (VarId v = 0; v < model.num_vars(); ++v) {
    if (!model.is_integral(v)) continue;
    if (!std::isfinite(model.lower(v)) || !std::isfinite(model.upper(v))) {
      throw Error(ErrorKind::InvalidModel, model.var_name(v) + " needs finite bounds");
    }
    integral.push_back(v);
    root.lower[v] = std::ceil(root.lower[v] - config.integrality_tol);
    root.upper[v] = std::floor(root.upper[v] + config.integrality_tol);
  }

  // The LP objective leaves out the constant term.
  const double offset = sign * model.objective().constant();
  // With integer coefficients on integer columns only, every feasible
  // objective value is an integer, so bounds can be rounded up.
  bool integer_objective = std::abs(offset - std::round(offset)) <= 1e-9;
  for (const auto& term : model.objective().terms()) {
    integer_objective = integer_objective && model.is_integral(term.var) &&
                        std::abs(term.coef - std::round(term.coef)) <= 1e-9;
  }

  std::optional<double> incumbent;  // minimization value (sign applied)
  std::vector<double> incumbent_x;
  auto prunable = [&](double lp_objective) {
    if (!incumbent) return false;
    double bound = lp_objective + offset;
    if (integer_objective) bound = std::ceil(bound - 1e-6);
    return bound >= *incumbent - 1e-9 * std::max(1.0, std::abs(*incumbent));
  };
  auto most_fractional = [&](const std::vector<double>& x) -> std::optional<VarId> {
    std::optional<VarId> best;
    double best_dist = -1.0;
    for (VarId v : integral) {
      const double frac = x[v] - std::floor(x[v]);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist <= config.integrality_tol) continue;
      if (config.branching == Branching::FirstFractional) return v;
      if (dist > best_dist + 1e-12) {
        best_dist = dist;
        best = v;
      }
    }
    return best;
  };
  auto offer = [&](const std::vector<double>& x) {
    const Assignment a = to_assignment(model, x, config.integrality_tol);
    const double value = sign * evaluate(model.objective(), a);
    if (!incumbent || value < *incumbent) {
      incumbent = value;
      incumbent_x = a.values();
    }
  };

  std::vector<Node> stack;
  stack.push_back(std::move(root));

  while (!stack.empty()) {
    if (result.nodes_explored >= config.node_limit) {
      result.status = SolveStatus::NodeLimit;
      result.solve_time = Clock::now() - start;
      return result;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++result.nodes_explored;

    problem.lower = node.lower;
    problem.upper = node.upper;
    const lp::Solution sol = lp::solve(problem, options);
    result.lp_iterations += sol.iterations;

    if (config.trace != nullptr) {
      *config.trace << "node " << result.nodes_explored << " depth " << node.depth << " bound "
                    << (sol.status == lp::Status::Optimal ? format_number(sign * sol.objective)
                                                          : std::string(lp::Status::Infeasible ==
                                                                                sol.status
                                                                            ? "infeasible"
                                                                            : "unbounded"))
                    << " incumbent "
                    << (incumbent ? format_number(sign * *incumbent) : std::string("none"))
                    << '\n';
    }

    if (sol.status == lp::Status::Infeasible) continue;
    if (sol.status == lp::Status::Unbounded) {
      // Integer columns are bounded, so an unbounded relaxation means an
      // unbounded continuous ray exists at every integer point.
      result.status = SolveStatus::Unbounded;
      result.solve_time = Clock::now() - start;
      return result;
    }
    if (prunable(sol.objective)) continue;

    const auto branch = most_fractional(sol.x);
    if (!branch) {
      offer(sol.x);
      continue;
    }

    const VarId branch_var = *branch;
    const double x = sol.x[branch_var];
    Node up = node;
    up.lower[branch_var] = std::ceil(x);
    up.depth = node.depth + 1;
    Node down = std::move(node);
    down.upper[branch_var] = std::floor(x);
    down.depth = up.depth;
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));  // floor branch explored first
  }

  if (incumbent) {
    result.status = SolveStatus::Optimal;
    Assignment a(std::move(incumbent_x));
    result.objective = evaluate(model.objective(), a);
    result.assignment = std::move(a);
  } else {
    result.status = SolveStatus::Infeasible;
  }
  result.solve_time = Clock::now() - start;
  return result;
}

std::vector<std::string> verify(const Model& model, const Assignment& assignment, double tol) {
  std::vector<std::string> violated;
  for (const auto& c : model.constraints()) {
    const double lhs = evaluate(c.lhs, assignment);
    bool ok = true;
    switch (c.sense) {
      case Sense::LessEqual: ok = lhs <= c.rhs + tol; break;
      case Sense::GreaterEqual: ok = lhs >= c.rhs - tol; break;
      case Sense::Equal: ok = std::abs(lhs - c.rhs) <= tol; break;
    }
    if (!ok) violated.push_back(c.name);
  }
  for (VarId v = 0; v < model.num_vars(); ++v) {
    const double x = assignment[v];
    if (x < model.lower(v) - tol || x > model.upper(v) + tol) {
      violated.push_back("bound:" + model.var_name(v));
    }
    if (model.is_integral(v) && std::abs(x - std::round(x)) > kIntegralityTol) {
      violated.push_back("integrality:" + model.var_name(v));
    }
  }
  return violated;
}

}  // namespace whatif
