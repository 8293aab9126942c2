#pragma once

// Dense bounded-variable primal simplex.
//
//   minimize    cost . x
//   subject to  row_i . x  (<=|>=|=)  rhs_i
//               lower <= x <= upper
//
// Phase I drives artificial variables to zero, phase II optimizes the real
// cost. Dantzig pricing with a switch to Bland's rule once the number of
// degenerate pivots in a phase reaches `bland_after`.

#include <cstddef>
#include <vector>

#include "whatif/model.hpp"

namespace whatif::lp {

struct Problem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> matrix;  // rows x cols, row-major
  std::vector<Sense> sense;
  std::vector<double> rhs;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;

  double& at(std::size_t r, std::size_t c) { return matrix[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return matrix[r * cols + c]; }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Options {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t bland_after = 1000;
  std::size_t iteration_limit = 200000;
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural values, size cols
  std::size_t iterations = 0;
  bool used_bland = false;
};

// Throws Error(NumericalInstability) when the iteration limit is hit or the
// final point violates the rows by more than a loose residual check.
Solution solve(const Problem& problem, const Options& options = {});

// Lowers the model's constraints, objective and bounds into dense form.
// Maximization is turned into minimization of the negated objective.
Problem from_model(const Model& model);

}  // namespace whatif::lp
