#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wot/constructions.hpp"
#include "wot/coupling.hpp"
#include "wot/decomposition.hpp"
#include "wot/lp.hpp"
#include "wot/measure.hpp"
#include "wot/order.hpp"
#include "wot/shadow.hpp"

namespace wot {

struct OracleResult {
  double value = 0.0;
  Coupling coupling;
};

namespace detail {

/// Variables pi_ij laid out row-major, optionally only on allowed pairs.
struct TransportVars {
  std::vector<std::vector<long>> index;  // -1 when the pair is excluded
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

template <typename Allow>
TransportVars add_transport_vars(lp::LinearProgram& prog, std::size_t n, std::size_t m, const Allow& allow,
                                 const std::vector<std::vector<double>>* cost = nullptr) {
  TransportVars v;
  v.index.assign(n, std::vector<long>(m, -1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (allow(i, j)) {
        v.index[i][j] = static_cast<long>(prog.add_variable(cost ? (*cost)[i][j] : 0.0));
        v.pairs.push_back({i, j});
      }
  return v;
}

inline void add_marginal_rows(lp::LinearProgram& prog, const TransportVars& v, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, lp::Relation col_rel) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t j = 0; j < nu.size(); ++j)
      if (v.index[i][j] >= 0) row.push_back({static_cast<std::size_t>(v.index[i][j]), 1.0});
    prog.add_row(row, lp::Relation::Equal, mu[i].w);
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (v.index[i][j] >= 0) row.push_back({static_cast<std::size_t>(v.index[i][j]), 1.0});
    prog.add_row(row, col_rel, nu[j].w);
  }
}

/// t_i >= |mu_i x_i - sum_j y_j pi_ij| with t_i priced at 1.
inline void add_barycentric_slacks(lp::LinearProgram& prog, const TransportVars& v, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::size_t t = prog.add_variable(1.0);
    std::vector<std::pair<std::size_t, double>> up{{t, 1.0}}, down{{t, 1.0}};
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (v.index[i][j] < 0) continue;
      up.push_back({static_cast<std::size_t>(v.index[i][j]), nu[j].x});
      down.push_back({static_cast<std::size_t>(v.index[i][j]), -nu[j].x});
    }
    prog.add_row(up, lp::Relation::GreaterEq, mu[i].w * mu[i].x);
    prog.add_row(down, lp::Relation::GreaterEq, -mu[i].w * mu[i].x);
  }
}

inline Coupling extract(const lp::LpSolution& sol, const TransportVars& v, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const Tolerances& tol) {
  std::vector<Coupling::Entry> raw;
  for (auto [i, j] : v.pairs) raw.push_back({i, j, sol.x[static_cast<std::size_t>(v.index[i][j])]});
  return Coupling::from_entries(mu, nu, raw, tol);
}

inline lp::LpSolution solve_or_throw(const lp::LinearProgram& prog, const char* what) {
  lp::LpSolution sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) fail(ErrorCode::LpInfeasible, std::string(what) + " has no optimum");
  if (sol.max_residual > 1e-9)
    fail(ErrorCode::NumericalFailure, std::string(what) + " residual " + std::to_string(sol.max_residual));
  return sol;
}

}  // namespace detail

/// Minimum of sum_i |mu_i x_i - sum_j y_j pi_ij| over all couplings.
inline OracleResult wot_value_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const Tolerances& tol = kDefaultTol) {
  detail::require_equal_mass(mu, nu, tol, "wot_value_lp");
  lp::LinearProgram prog;
  auto v = detail::add_transport_vars(prog, mu.size(), nu.size(), [](std::size_t, std::size_t) { return true; });
  detail::add_marginal_rows(prog, v, mu, nu, lp::Relation::Equal);
  detail::add_barycentric_slacks(prog, v, mu, nu);
  lp::LpSolution sol = detail::solve_or_throw(prog, "WOT program");
  return {sol.objective, detail::extract(sol, v, mu, nu, tol)};
}

enum class BarycenterRule { Any, AtLeast, Equal, AtMost };

/// Optimizes sum c_ij pi_ij over couplings with per-row barycenter rules and an
/// allowed-pair mask.
template <typename Allow, typename Rule>
OracleResult constrained_coupling_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& cost,
                                     lp::Sense sense, const Allow& allow, const Rule& rule,
                                     const Tolerances& tol = kDefaultTol) {
  detail::require_equal_mass(mu, nu, tol, "constrained_coupling_lp");
  if (cost.size() != mu.size()) fail(ErrorCode::DimensionMismatch, "cost rows differ from source size");
  for (const auto& row : cost)
    if (row.size() != nu.size()) fail(ErrorCode::DimensionMismatch, "cost columns differ from target size");
  lp::LinearProgram prog;
  prog.sense = sense;
  auto v = detail::add_transport_vars(prog, mu.size(), nu.size(), allow, &cost);
  detail::add_marginal_rows(prog, v, mu, nu, lp::Relation::Equal);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    BarycenterRule r = rule(i);
    if (r == BarycenterRule::Any) continue;
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t j = 0; j < nu.size(); ++j)
      if (v.index[i][j] >= 0) row.push_back({static_cast<std::size_t>(v.index[i][j]), nu[j].x - mu[i].x});
    lp::Relation rel = r == BarycenterRule::AtLeast ? lp::Relation::GreaterEq
                       : r == BarycenterRule::AtMost ? lp::Relation::LessEq
                                                     : lp::Relation::Equal;
    prog.add_row(row, rel, 0.0);
  }
  lp::LpSolution sol = detail::solve_or_throw(prog, "constrained coupling program");
  return {sol.objective, detail::extract(sol, v, mu, nu, tol)};
}

/// Extreme of sum c_ij pi_ij over the WOT-optimal couplings.
inline OracleResult constrained_ot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& cost,
                                      Sense sense, const Tolerances& tol = kDefaultTol) {
  Cutpoints cut = compute_cutpoints(mu, nu, tol);
  auto allow = [&](std::size_t i, std::size_t j) {
    return region_allows(region_of(mu[i].x, cut.x_minus, cut.x_plus), nu[j].x, cut.x_minus, cut.x_plus, tol.pos);
  };
  auto rule = [&](std::size_t i) {
    switch (region_of(mu[i].x, cut.x_minus, cut.x_plus)) {
      case Region::Left: return BarycenterRule::AtLeast;
      case Region::Right: return BarycenterRule::AtMost;
      default: return BarycenterRule::Equal;
    }
  };
  return constrained_coupling_lp(mu, nu, cost, sense == Sense::Min ? lp::Sense::Minimize : lp::Sense::Maximize, allow,
                                 rule, tol);
}

struct MinTargetResult {
  double value = 0.0;
  DiscreteMeasure theta;  // column sums of the optimal sub-coupling
  Coupling coupling;      // optimal coupling of (mu, theta)
};

/// min V(mu, theta) over theta <= nu setwise with mass(theta) = mass(mu).
inline MinTargetResult min_target_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const Tolerances& tol = kDefaultTol) {
  detail::require_mass_order(mu, nu, tol);
  if (mu.empty()) return {};
  lp::LinearProgram prog;
  auto v = detail::add_transport_vars(prog, mu.size(), nu.size(), [](std::size_t, std::size_t) { return true; });
  detail::add_marginal_rows(prog, v, mu, nu, lp::Relation::LessEq);
  detail::add_barycentric_slacks(prog, v, mu, nu);
  lp::LpSolution sol = detail::solve_or_throw(prog, "minimal target program");
  std::vector<Atom> cols;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += sol.x[static_cast<std::size_t>(v.index[i][j])];
    cols.push_back({nu[j].x, s});
  }
  MinTargetResult out;
  out.value = sol.objective;
  out.theta = DiscreteMeasure::from_signed(std::move(cols), ErrorCode::NumericalFailure, tol);
  std::vector<Coupling::Entry> raw;
  for (auto [i, j] : v.pairs) {
    auto jj = out.theta.find(nu[j].x, tol.pos);
    double m = sol.x[static_cast<std::size_t>(v.index[i][j])];
    if (jj) raw.push_back({i, *jj, m});
  }
  out.coupling = Coupling::from_entries(mu, out.theta, raw, tol);
  return out;
}

struct MinTargetCheck {
  double min_value = 0.0;
  DiscreteMeasure witness;
  double shadow_value = 0.0;
  bool shadow_attains = false;   // V(mu, S) = min within 1e-7
  bool shadow_below = false;     // S <=_c witness
};

inline MinTargetCheck min_target_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const Tolerances& tol = kDefaultTol) {
  MinTargetResult lp = min_target_lp(mu, nu, tol);
  DiscreteMeasure s = shadow(mu, nu, tol);
  MinTargetCheck r;
  r.min_value = lp.value;
  r.witness = lp.theta;
  r.shadow_value = mu.empty() ? 0.0 : wot_value(mu, s, tol);
  r.shadow_attains = std::abs(r.shadow_value - r.min_value) <= 1e-7;
  r.shadow_below = mu.empty() || check_order(s, lp.theta, OrderRelation::Convex, {tol.pos, tol.mass, 1e-7, tol.grid});
  return r;
}

/// Random member of the optimal set: a convex combination of LP vertices
/// reached with random linear objectives.
template <typename Rng>
Coupling sample_pistar_member(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Rng& rng,
                              std::size_t vertices = 3, const Tolerances& tol = kDefaultTol) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), weight(0.1, 1.0);
  Coupling acc;
  double total = 0.0;
  for (std::size_t v = 0; v < vertices; ++v) {
    CostMatrix cost(mu.size(), std::vector<double>(nu.size()));
    for (auto& row : cost)
      for (double& c : row) c = unit(rng);
    Coupling vert = constrained_ot_lp(mu, nu, cost, Sense::Min, tol).coupling;
    double w = weight(rng);
    acc = v == 0 ? vert : mix(acc, vert, total / (total + w));
    total += w;
  }
  return acc;
}

/// Random coupling with the given per-row barycenter rule on every row.
template <typename Rng>
Coupling sample_barycenter_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, BarycenterRule rule,
                                    Rng& rng, const Tolerances& tol = kDefaultTol) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  CostMatrix cost(mu.size(), std::vector<double>(nu.size()));
  for (auto& row : cost)
    for (double& c : row) c = unit(rng);
  return constrained_coupling_lp(
             mu, nu, cost, lp::Sense::Minimize, [](std::size_t, std::size_t) { return true; },
             [&](std::size_t) { return rule; }, tol)
      .coupling;
}

/// North-west corner coupling after shuffling both atom orders.
template <typename Rng>
Coupling sample_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Rng& rng,
                         const Tolerances& tol = kDefaultTol) {
  std::vector<std::size_t> rows(mu.size()), cols(nu.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  std::vector<Coupling::Entry> raw;
  std::size_t a = 0, b = 0;
  double ra = rows.empty() ? 0.0 : mu[rows[0]].w, rb = cols.empty() ? 0.0 : nu[cols[0]].w;
  while (a < rows.size() && b < cols.size()) {
    double step = std::min(ra, rb);
    raw.push_back({rows[a], cols[b], step});
    ra -= step;
    rb -= step;
    if (ra <= tol.mass && ++a < rows.size()) ra = mu[rows[a]].w;
    if (rb <= tol.mass && ++b < cols.size()) rb = nu[cols[b]].w;
  }
  return Coupling::from_entries(mu, nu, raw, tol);
}

}  // namespace wot
