#include "whatif/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace whatif::lp {

namespace {

enum class ColState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

// Tableau over structural, slack and artificial columns plus one trailing
// column holding B^-1 b.
class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt) : p_(p), opt_(opt) { init(); }

  Solution run() {
    Solution sol;
    if (num_art_ > 0) {
      set_phase_one_costs();
      const Status s1 = iterate(sol);
      recompute_basics();
      if (s1 == Status::Unbounded) {
        // Phase I objective is bounded below by zero.
        throw Error(ErrorKind::NumericalInstability, "phase I reported unbounded");
      }
      double infeas = 0.0;
      for (std::size_t j = art_begin_; j < total_; ++j) infeas += value_[j];
      if (infeas > opt_.feasibility_tol * std::max<double>(1.0, static_cast<double>(p_.rows))) {
        sol.status = Status::Infeasible;
        return sol;
      }
      retire_artificials();
    }
    set_phase_two_costs();
    sol.status = iterate(sol);
    recompute_basics();
    if (sol.status != Status::Optimal) return sol;

    sol.x.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(p_.cols));
    check_residuals(sol.x);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < p_.cols; ++j) sol.objective += p_.cost[j] * sol.x[j];
    return sol;
  }

 private:
  double& t(std::size_t r, std::size_t c) { return tab_[r * width_ + c]; }
  double t(std::size_t r, std::size_t c) const { return tab_[r * width_ + c]; }

  void init() {
    const std::size_t m = p_.rows;
    const std::size_t n = p_.cols;
    lo_.assign(p_.lower.begin(), p_.lower.end());
    up_.assign(p_.upper.begin(), p_.upper.end());
    state_.resize(n);
    value_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (lo_[j] > up_[j]) {
        trivially_infeasible_ = true;
      }
      if (std::isfinite(lo_[j])) {
        state_[j] = ColState::AtLower;
        value_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        state_[j] = ColState::AtUpper;
        value_[j] = up_[j];
      } else {
        state_[j] = ColState::FreeZero;
        value_[j] = 0.0;
      }
    }
    // Slacks: row . x + s = rhs.
    for (std::size_t i = 0; i < m; ++i) {
      switch (p_.sense[i]) {
        case Sense::LessEqual: lo_.push_back(0.0); up_.push_back(kInfinity); break;
        case Sense::GreaterEqual: lo_.push_back(-kInfinity); up_.push_back(0.0); break;
        case Sense::Equal: lo_.push_back(0.0); up_.push_back(0.0); break;
      }
    }
    std::vector<double> residual(m);
    std::vector<int> needs_art(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      double r = p_.rhs[i];
      for (std::size_t j = 0; j < n; ++j) r -= p_.at(i, j) * value_[j];
      residual[i] = r;
      const double slo = lo_[n + i];
      const double sup = up_[n + i];
      if (r < slo - opt_.feasibility_tol || r > sup + opt_.feasibility_tol) {
        needs_art[i] = 1;
        ++num_art_;
      }
    }
    art_begin_ = n + m;
    total_ = n + m + num_art_;
    width_ = total_ + 1;
    rhs_col_ = total_;
    lo_.resize(total_, 0.0);
    up_.resize(total_, kInfinity);
    state_.resize(total_);
    value_.resize(total_);
    tab_.assign(m * width_, 0.0);
    basis_.resize(m);

    std::size_t next_art = art_begin_;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t slack = n + i;
      if (!needs_art[i]) {
        for (std::size_t j = 0; j < n; ++j) t(i, j) = p_.at(i, j);
        t(i, slack) = 1.0;
        t(i, rhs_col_) = p_.rhs[i];
        basis_[i] = slack;
        state_[slack] = ColState::Basic;
        value_[slack] = residual[i];
        continue;
      }
      // Slack parks at the bound nearest the residual; the artificial
      // absorbs the rest with a sign that keeps it non-negative.
      const double bound = residual[i] < lo_[slack] ? lo_[slack] : up_[slack];
      const double rest = residual[i] - bound;
      const double sigma = rest >= 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n; ++j) t(i, j) = sigma * p_.at(i, j);
      t(i, slack) = sigma;
      t(i, next_art) = 1.0;
      t(i, rhs_col_) = sigma * p_.rhs[i];
      state_[slack] = bound == lo_[slack] ? ColState::AtLower : ColState::AtUpper;
      value_[slack] = bound;
      basis_[i] = next_art;
      state_[next_art] = ColState::Basic;
      value_[next_art] = std::abs(rest);
      ++next_art;
    }
    reduced_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
  }

  void set_phase_one_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = art_begin_; j < total_; ++j) cost_[j] = 1.0;
    price_all();
  }

  void set_phase_two_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = 0; j < p_.cols; ++j) cost_[j] = p_.cost[j];
    price_all();
  }

  void price_all() {
    for (std::size_t j = 0; j < total_; ++j) reduced_[j] = cost_[j];
    for (std::size_t i = 0; i < p_.rows; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) reduced_[j] -= cb * t(i, j);
    }
  }

  // x_B = B^-1 b - sum over nonbasic columns of (B^-1 A)_j x_j.
  void recompute_basics() {
    for (std::size_t i = 0; i < p_.rows; ++i) {
      double v = t(i, rhs_col_);
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] != ColState::Basic && value_[j] != 0.0) v -= t(i, j) * value_[j];
      }
      value_[basis_[i]] = v;
    }
  }

  void retire_artificials() {
    for (std::size_t i = 0; i < p_.rows; ++i) {
      const std::size_t b = basis_[i];
      if (b < art_begin_) continue;
      std::size_t best = total_;
      double best_mag = 1e-7;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (state_[j] == ColState::Basic) continue;
        const double mag = std::abs(t(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best == total_) continue;  // redundant row; artificial stays basic at 0
      const double old = value_[best];
      pivot(i, best);
      value_[best] = old;
      state_[b] = ColState::AtLower;
      value_[b] = 0.0;
    }
    for (std::size_t j = art_begin_; j < total_; ++j) {
      up_[j] = 0.0;
      if (state_[j] != ColState::Basic) {
        state_[j] = ColState::AtLower;
        value_[j] = 0.0;
      }
    }
    recompute_basics();
  }

  void pivot(std::size_t row, std::size_t col) {
    const double piv = t(row, col);
    double* prow = &tab_[row * width_];
    for (std::size_t j = 0; j < width_; ++j) prow[j] /= piv;
    prow[col] = 1.0;
    for (std::size_t i = 0; i < p_.rows; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f == 0.0) continue;
      double* r = &tab_[i * width_];
      for (std::size_t j = 0; j < width_; ++j) r[j] -= f * prow[j];
      r[col] = 0.0;
    }
    const double fd = reduced_[col];
    if (fd != 0.0) {
      for (std::size_t j = 0; j < total_; ++j) reduced_[j] -= fd * prow[j];
      reduced_[col] = 0.0;
    }
    state_[basis_[row]] = ColState::AtLower;  // caller fixes the exact state
    basis_[row] = col;
    state_[col] = ColState::Basic;
  }

  // Returns the entering column and its direction, or total_ when optimal.
  std::size_t choose_entering(bool bland, int& dir) const {
    std::size_t best = total_;
    double best_score = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      const ColState s = state_[j];
      if (s == ColState::Basic || lo_[j] == up_[j]) continue;
      const double d = reduced_[j];
      int candidate_dir = 0;
      if ((s == ColState::AtLower || s == ColState::FreeZero) && d < -opt_.optimality_tol) {
        candidate_dir = 1;
      } else if ((s == ColState::AtUpper || s == ColState::FreeZero) &&
                 d > opt_.optimality_tol) {
        candidate_dir = -1;
      }
      if (candidate_dir == 0) continue;
      if (bland) {
        dir = candidate_dir;
        return j;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = j;
        dir = candidate_dir;
      }
    }
    return best;
  }

  Status iterate(Solution& sol) {
    std::size_t degenerate = 0;
    bool bland = false;
    while (true) {
      if (sol.iterations >= opt_.iteration_limit) {
        throw Error(ErrorKind::NumericalInstability,
                    "simplex iteration limit reached (" + std::to_string(sol.iterations) + ")");
      }
      int dir = 0;
      const std::size_t enter = choose_entering(bland, dir);
      if (enter == total_) return Status::Optimal;
      ++sol.iterations;

      // Ratio test. Basic i moves at rate alpha_i = -dir * T(i, enter).
      double step = kInfinity;
      std::size_t leave_row = p_.rows;
      bool leave_to_upper = false;
      double leave_mag = 0.0;
      for (std::size_t i = 0; i < p_.rows; ++i) {
        const double a = t(i, enter);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const double alpha = -dir * a;
        const std::size_t b = basis_[i];
        double limit;
        bool to_upper;
        if (alpha < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limit = (value_[b] - lo_[b]) / -alpha;
          to_upper = false;
        } else {
          if (!std::isfinite(up_[b])) continue;
          limit = (up_[b] - value_[b]) / alpha;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (leave_row == p_.rows || limit < step - 1e-12) {
          take = true;
        } else if (limit <= step + 1e-12) {
          take = bland ? basis_[i] < basis_[leave_row] : std::abs(a) > leave_mag;
        }
        if (take) {
          step = std::min(step, limit);
          leave_row = i;
          leave_to_upper = to_upper;
          leave_mag = std::abs(a);
        }
      }
      const double range = up_[enter] - lo_[enter];
      const bool flip = std::isfinite(range) && range <= step;
      if (flip) step = range;
      if (!std::isfinite(step)) return Status::Unbounded;

      if (step <= 1e-12) {
        if (++degenerate >= opt_.bland_after && !bland) {
          bland = true;
          sol.used_bland = true;
        }
      }

      for (std::size_t i = 0; i < p_.rows; ++i) {
        const double a = t(i, enter);
        if (a != 0.0) value_[basis_[i]] -= dir * a * step;
      }
      value_[enter] += dir * step;

      if (flip) {
        if (dir > 0) {
          state_[enter] = ColState::AtUpper;
          value_[enter] = up_[enter];
        } else {
          state_[enter] = ColState::AtLower;
          value_[enter] = lo_[enter];
        }
        continue;
      }
      const std::size_t leaving = basis_[leave_row];
      const double entered_value = value_[enter];
      pivot(leave_row, enter);
      value_[enter] = entered_value;
      if (leave_to_upper) {
        state_[leaving] = ColState::AtUpper;
        value_[leaving] = up_[leaving];
      } else {
        state_[leaving] = ColState::AtLower;
        value_[leaving] = lo_[leaving];
      }
    }
  }

  void check_residuals(const std::vector<double>& x) const {
    for (std::size_t i = 0; i < p_.rows; ++i) {
      double lhs = 0.0;
      double scale = std::abs(p_.rhs[i]);
      for (std::size_t j = 0; j < p_.cols; ++j) {
        lhs += p_.at(i, j) * x[j];
        scale = std::max(scale, std::abs(p_.at(i, j) * x[j]));
      }
      const double tol = 1e-6 * (1.0 + scale);
      const double viol = p_.sense[i] == Sense::LessEqual      ? lhs - p_.rhs[i]
                          : p_.sense[i] == Sense::GreaterEqual ? p_.rhs[i] - lhs
                                                               : std::abs(lhs - p_.rhs[i]);
      if (viol > tol) {
        throw Error(ErrorKind::NumericalInstability,
                    "row " + std::to_string(i) + " violated by " + format_number(viol) +
                        " after simplex");
      }
    }
  }

 public:
  bool trivially_infeasible() const { return trivially_infeasible_; }

 private:
  const Problem& p_;
  const Options& opt_;
  std::size_t num_art_ = 0;
  std::size_t art_begin_ = 0;
  std::size_t total_ = 0;
  std::size_t width_ = 0;
  std::size_t rhs_col_ = 0;
  std::vector<double> tab_;
  std::vector<double> lo_, up_, value_, reduced_, cost_;
  std::vector<ColState> state_;
  std::vector<std::size_t> basis_;
  bool trivially_infeasible_ = false;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  Tableau tab(problem, options);
  if (tab.trivially_infeasible()) return Solution{};
  return tab.run();
}

Problem from_model(const Model& model) {
  Problem p;
  p.rows = model.constraints().size();
  p.cols = model.num_vars();
  p.matrix.assign(p.rows * p.cols, 0.0);
  for (std::size_t i = 0; i < p.rows; ++i) {
    const Constraint& c = model.constraints()[i];
    for (const auto& term : c.lhs.terms()) p.at(i, term.var) += term.coef;
    p.sense.push_back(c.sense);
    p.rhs.push_back(c.rhs);
  }
  const double sign = model.sense() == ObjectiveSense::Minimize ? 1.0 : -1.0;
  p.cost.assign(p.cols, 0.0);
  for (const auto& term : model.objective().terms()) p.cost[term.var] += sign * term.coef;
  for (VarId v = 0; v < p.cols; ++v) {
    p.lower.push_back(model.lower(v));
    p.upper.push_back(model.upper(v));
  }
  return p;
}

}  // namespace whatif::lp
