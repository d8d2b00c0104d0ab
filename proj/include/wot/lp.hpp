#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "wot/errors.hpp"

namespace wot::lp {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

/// Linear program over nonnegative variables.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    Relation rel = Relation::Equal;
    double rhs = 0.0;
  };

  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Row> rows;

  std::size_t add_variable(double cost = 0.0) {
    objective.push_back(cost);
    return objective.size() - 1;
  }
  void add_row(std::vector<std::pair<std::size_t, double>> terms, Relation rel, double rhs) {
    for (auto& [j, a] : terms) {
      if (j >= objective.size()) fail(ErrorCode::DimensionMismatch, "constraint references unknown variable");
      if (!std::isfinite(a)) fail(ErrorCode::NumericalFailure, "non-finite constraint coefficient");
    }
    if (!std::isfinite(rhs)) fail(ErrorCode::NumericalFailure, "non-finite right-hand side");
    rows.push_back({std::move(terms), rel, rhs});
  }
  std::size_t num_variables() const { return objective.size(); }
};

struct LpSolution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  double max_residual = 0.0;  // worst constraint violation of x against the original rows
  std::size_t pivots = 0;
};

struct SolverOptions {
  double cost_tol = 1e-10;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 200000;
};

/// Dense two-phase primal simplex with Bland's rule.
///
/// Entering variable: smallest index with negative reduced cost. Leaving
/// variable: minimum ratio, ties broken by smallest basic index. The pivot
/// sequence is a deterministic function of the input.
class Solver {
 public:
  explicit Solver(SolverOptions opts = {}) : opts_(opts) {}

  LpSolution solve(const LinearProgram& lp) {
    build(lp);
    LpSolution sol;

    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1(cols_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) phase1[j] = 1.0;
    set_costs(phase1);
    if (!iterate(sol.pivots)) fail(ErrorCode::NumericalFailure, "phase 1 reported unbounded");
    double scale = 1.0;
    for (double v : rhs_) scale = std::max(scale, std::abs(v));
    if (-value_ > opts_.feasibility_tol * scale) {
      sol.status = Status::Infeasible;
      return sol;
    }
    drive_out_artificials();

    // Phase 2 on the original objective, artificials barred from entering.
    std::vector<double> phase2(cols_, 0.0);
    double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) phase2[j] = sign * lp.objective[j];
    allowed_cols_ = first_artificial_;
    set_costs(phase2);
    if (!iterate(sol.pivots)) {
      sol.status = Status::Unbounded;
      return sol;
    }

    sol.status = Status::Optimal;
    sol.x.assign(lp.num_variables(), 0.0);
    for (std::size_t r = 0; r < basis_.size(); ++r)
      if (basis_[r] < lp.num_variables()) sol.x[basis_[r]] = std::max(0.0, rhs_[r]);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) sol.objective += lp.objective[j] * sol.x[j];
    sol.max_residual = residual(lp, sol.x);
    return sol;
  }

  static double residual(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const auto& row : lp.rows) {
      double lhs = 0.0;
      for (auto [j, a] : row.terms) lhs += a * x[j];
      double viol = 0.0;
      switch (row.rel) {
        case Relation::LessEq: viol = lhs - row.rhs; break;
        case Relation::GreaterEq: viol = row.rhs - lhs; break;
        case Relation::Equal: viol = std::abs(lhs - row.rhs); break;
      }
      worst = std::max(worst, viol);
    }
    return worst;
  }

 private:
  void build(const LinearProgram& lp) {
    const std::size_t n = lp.num_variables();
    const std::size_t m = lp.rows.size();
    std::size_t slacks = 0, artificials = 0;
    std::vector<Relation> rel(m);
    std::vector<double> sgn(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      rel[i] = lp.rows[i].rel;
      if (lp.rows[i].rhs < 0.0) {
        sgn[i] = -1.0;
        if (rel[i] == Relation::LessEq) rel[i] = Relation::GreaterEq;
        else if (rel[i] == Relation::GreaterEq) rel[i] = Relation::LessEq;
      }
      if (rel[i] != Relation::Equal) ++slacks;
      if (rel[i] != Relation::LessEq) ++artificials;
    }
    first_artificial_ = n + slacks;
    cols_ = n + slacks + artificials;
    allowed_cols_ = cols_;
    tab_.assign(m, std::vector<double>(cols_, 0.0));
    rhs_.assign(m, 0.0);
    basis_.assign(m, 0);
    std::size_t next_slack = n, next_art = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      for (auto [j, a] : lp.rows[i].terms) tab_[i][j] += sgn[i] * a;
      rhs_[i] = sgn[i] * lp.rows[i].rhs;
      if (rel[i] == Relation::LessEq) {
        tab_[i][next_slack] = 1.0;
        basis_[i] = next_slack++;
      } else if (rel[i] == Relation::GreaterEq) {
        tab_[i][next_slack++] = -1.0;
        tab_[i][next_art] = 1.0;
        basis_[i] = next_art++;
      } else {
        tab_[i][next_art] = 1.0;
        basis_[i] = next_art++;
      }
    }
  }

  void set_costs(const std::vector<double>& cost) {
    reduced_ = cost;
    value_ = 0.0;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * tab_[r][j];
      value_ -= cb * rhs_[r];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    std::vector<double>& prow = tab_[r];
    double p = prow[c];
    for (double& v : prow) v /= p;
    rhs_[r] /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (i == r) continue;
      double f = tab_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] -= f * prow[j];
      tab_[i][c] = 0.0;
      rhs_[i] -= f * rhs_[r];
    }
    double f = reduced_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= f * prow[j];
      reduced_[c] = 0.0;
      value_ -= f * rhs_[r];
    }
    basis_[r] = c;
  }

  /// Returns false if the current objective is unbounded below.
  bool iterate(std::size_t& pivots) {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < allowed_cols_; ++j) {
        if (reduced_[j] < -opts_.cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = tab_.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tab_.size(); ++i) {
        double a = tab_[i][enter];
        if (a <= opts_.pivot_tol) continue;
        double ratio = std::max(0.0, rhs_[i]) / a;
        if (leave == tab_.size() || ratio < best - 1e-14) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave == tab_.size()) return false;
      pivot(leave, enter);
      if (++pivots > opts_.max_pivots) fail(ErrorCode::NumericalFailure, "simplex pivot limit exceeded");
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < basis_.size();) {
      if (basis_[r] < first_artificial_) {
        ++r;
        continue;
      }
      std::size_t c = first_artificial_;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(tab_[r][j]) > opts_.pivot_tol) {
          c = j;
          break;
        }
      }
      if (c < first_artificial_) {
        pivot(r, c);
        ++r;
      } else {
        // Redundant constraint.
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(r));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  SolverOptions opts_;
  std::vector<std::vector<double>> tab_;
  std::vector<double> rhs_;
  std::vector<double> reduced_;
  std::vector<std::size_t> basis_;
  double value_ = 0.0;
  std::size_t cols_ = 0;
  std::size_t allowed_cols_ = 0;
  std::size_t first_artificial_ = 0;
};

inline LpSolution solve(const LinearProgram& lp, SolverOptions opts = {}) { return Solver(opts).solve(lp); }

}  // namespace wot::lp
