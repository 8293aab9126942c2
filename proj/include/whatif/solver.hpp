#pragma once

// Exact solver for desk-scale MIPs: LP relaxations by bounded-variable
// simplex, integrality by depth-first branch and bound.

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "whatif/model.hpp"

namespace whatif {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };
enum class Branching { MostFractional, FirstFractional };

std::string_view to_string(SolveStatus s);

struct SolverConfig {
  double integrality_tol = kIntegralityTol;
  double feasibility_tol = 1e-7;
  std::size_t node_limit = 1'000'000;
  Branching branching = Branching::MostFractional;
  // One line per branch-and-bound node (depth, bound, incumbent) when set.
  std::ostream* trace = nullptr;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<double> objective;        // iff optimal
  std::optional<Assignment> assignment;   // iff optimal
  std::size_t nodes_explored = 0;
  std::size_t lp_iterations = 0;
  std::chrono::nanoseconds solve_time{0};

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// Solves the LP relaxation (integer and binary domains dropped).
SolveResult solve_lp(const Model& model, const SolverConfig& config = {});

// Global optimum over the integer-feasible set. Deterministic for a given
// (model, config). Returns status NodeLimit when the node budget runs out.
SolveResult solve(const Model& model, const SolverConfig& config = {});

// Names of violated constraints. Bound and integrality violations are
// reported as "bound:<var>" and "integrality:<var>".
std::vector<std::string> verify(const Model& model, const Assignment& assignment,
                                double tol = 1e-6);

}  // namespace whatif
