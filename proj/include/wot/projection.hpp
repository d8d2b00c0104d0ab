#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wot/decomposition.hpp"
#include "wot/errors.hpp"
#include "wot/lp.hpp"
#include "wot/measure.hpp"
#include "wot/order.hpp"
#include "wot/pwl.hpp"

namespace wot {

/// Convex h >= 0 with h(0) = 0.
class ConvexCost {
 public:
  enum class Kind { AbsoluteValue, Power, PiecewiseLinear };

  static ConvexCost absolute() { return ConvexCost(Kind::AbsoluteValue, 1.0, {}); }

  static ConvexCost power(double exponent) {
    if (!(exponent >= 1.0) || !std::isfinite(exponent))
      fail(ErrorCode::BadCost, "power cost needs exponent >= 1, got " + std::to_string(exponent));
    return ConvexCost(Kind::Power, exponent, {});
  }

  static ConvexCost piecewise_linear(PwlFunction h, const Tolerances& tol = kDefaultTol) {
    if (!h.is_convex(tol.eps)) fail(ErrorCode::BadCost, "piecewise-linear cost is not convex");
    if (std::abs(h.evaluate(0.0)) > tol.eps) fail(ErrorCode::BadCost, "cost does not vanish at 0");
    if (h.left_derivative(0.0) > tol.eps || h.right_derivative(0.0) < -tol.eps)
      fail(ErrorCode::BadCost, "cost is negative somewhere");
    return ConvexCost(Kind::PiecewiseLinear, 1.0, std::move(h));
  }

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  const PwlFunction& pwl() const { return pwl_; }

  double operator()(double d) const {
    switch (kind_) {
      case Kind::AbsoluteValue: return std::abs(d);
      case Kind::Power: return std::pow(std::abs(d), exponent_);
      case Kind::PiecewiseLinear: return pwl_.evaluate(d);
    }
    return 0.0;
  }

 private:
  ConvexCost(Kind k, double e, PwlFunction f) : kind_(k), exponent_(e), pwl_(std::move(f)) {}

  Kind kind_;
  double exponent_;
  PwlFunction pwl_;
};

struct MapSample {
  double x = 0.0;
  double t = 0.0;
};

/// Map known at the source atoms, linear in between, constant outside.
class MonotoneMap {
 public:
  MonotoneMap() = default;
  explicit MonotoneMap(std::vector<MapSample> samples) : samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end(), [](const MapSample& a, const MapSample& b) { return a.x < b.x; });
  }

  static MonotoneMap identity(const DiscreteMeasure& mu) {
    std::vector<MapSample> s;
    for (const Atom& a : mu.atoms()) s.push_back({a.x, a.x});
    return MonotoneMap(std::move(s));
  }

  const std::vector<MapSample>& samples() const { return samples_; }

  double operator()(double x) const {
    if (samples_.empty()) return x;
    if (x <= samples_.front().x) return samples_.front().t;
    if (x >= samples_.back().x) return samples_.back().t;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x, [](double v, const MapSample& s) { return v < s.x; });
    const MapSample& hi = *it;
    const MapSample& lo = *(it - 1);
    return lo.t + (x - lo.x) / (hi.x - lo.x) * (hi.t - lo.t);
  }

  bool is_monotone(double eps = kDefaultTol.eps) const {
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (samples_[i].t < samples_[i - 1].t - eps) return false;
    return true;
  }

  bool is_lipschitz(double eps = kDefaultTol.eps) const {
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (samples_[i].t - samples_[i - 1].t > samples_[i].x - samples_[i - 1].x + eps) return false;
    return true;
  }

  DiscreteMeasure push_forward(const DiscreteMeasure& mu, const Tolerances& tol = kDefaultTol) const {
    std::vector<Atom> atoms;
    for (const Atom& a : mu.atoms()) atoms.push_back({(*this)(a.x), a.w});
    return DiscreteMeasure::from_atoms(std::move(atoms), tol);
  }

 private:
  std::vector<MapSample> samples_;
};

struct Projection {
  DiscreteMeasure image;  // mu*
  MonotoneMap map;        // T* at the atoms of mu
};

namespace detail {

/// Integral of the quantile function of m over [0, u].
inline double quantile_integral(const DiscreteMeasure& m, double u) {
  double acc = 0.0, cum = 0.0;
  for (const Atom& a : m.atoms()) {
    double take = std::min(a.w, u - cum);
    if (take <= 0.0) break;
    acc += take * a.x;
    cum += take;
  }
  return acc;
}

}  // namespace detail

/// The image of mu under the admissible map that is greatest in convex order
/// among monotone 1-Lipschitz maps S with S(mu) <=_c nu.
///
/// Variables t_i = l_nu + s_i with s >= 0. With t non-decreasing, S(mu) <=_c nu
/// is the quantile-integral condition at the cumulative masses of mu; minimizing
/// the sum of these integrals picks the convex-order maximum.
inline Projection project_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const Tolerances& tol = kDefaultTol) {
  detail::require_equal_mass(mu, nu, tol, "project_convex_order");
  if (mu.empty()) return {};
  const std::size_t n = mu.size();
  const double lo = nu.min_position();
  lp::LinearProgram prog;
  for (std::size_t i = 0; i < n; ++i) prog.add_variable(mu[i].w * static_cast<double>(n - i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    prog.add_row({{i + 1, 1.0}, {i, -1.0}}, lp::Relation::GreaterEq, 0.0);
    prog.add_row({{i + 1, 1.0}, {i, -1.0}}, lp::Relation::LessEq, mu[i + 1].x - mu[i].x);
  }
  double cum = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t i = 0; i < n; ++i) {
    cum += mu[i].w;
    terms.push_back({i, mu[i].w});
    double u = i + 1 == n ? nu.mass() : cum;
    double rhs = detail::quantile_integral(nu, u) - lo * u;
    prog.add_row(terms, i + 1 == n ? lp::Relation::Equal : lp::Relation::GreaterEq, rhs);
  }
  lp::LpSolution sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) fail(ErrorCode::LpInfeasible, "projection program has no optimum");
  std::vector<MapSample> samples;
  for (std::size_t i = 0; i < n; ++i) samples.push_back({mu[i].x, lo + sol.x[i]});
  Projection out;
  out.map = MonotoneMap(std::move(samples));
  out.image = out.map.push_forward(mu, tol);
  return out;
}

struct GridProjection {
  DiscreteMeasure image;
  double objective = 0.0;  // W1 distance to mu
  std::size_t grid_points = 0;
};

/// W1-nearest measure in convex order below nu among measures on a grid:
/// the union of both supports plus `grid_size` equispaced points on the hull
/// of nu's support. Each of `refinements` further rounds doubles the grid.
inline GridProjection grid_projection(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t grid_size = 64,
                                      std::size_t refinements = 0, const Tolerances& tol = kDefaultTol) {
  detail::require_equal_mass(mu, nu, tol, "grid_projection");
  if (mu.empty()) return {};
  GridProjection best;
  for (std::size_t round = 0; round <= refinements; ++round, grid_size *= 2) {
    std::vector<double> grid;
    for (const Atom& a : mu.atoms()) grid.push_back(a.x);
    for (const Atom& a : nu.atoms()) grid.push_back(a.x);
    double lo = nu.min_position(), hi = nu.max_position();
    for (std::size_t g = 0; g < grid_size && hi > lo; ++g)
      grid.push_back(lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_size - 1));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [&](double a, double b) { return b - a <= tol.pos; }), grid.end());
    const std::size_t g = grid.size();

    lp::LinearProgram prog;
    for (std::size_t k = 0; k < g; ++k) prog.add_variable(0.0);
    std::vector<std::pair<std::size_t, double>> mass_row, mean_row;
    for (std::size_t k = 0; k < g; ++k) {
      mass_row.push_back({k, 1.0});
      mean_row.push_back({k, grid[k]});
    }
    prog.add_row(mass_row, lp::Relation::Equal, nu.mass());
    prog.add_row(mean_row, lp::Relation::Equal, nu.mean());
    PwlFunction pnu = put_potential(nu);
    for (std::size_t k = 1; k < g; ++k) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t l = 0; l < k; ++l) row.push_back({l, grid[k] - grid[l]});
      prog.add_row(row, lp::Relation::LessEq, pnu.evaluate(grid[k]));
    }
    // |F_hat - F_mu| on [grid_k, grid_k+1) as a - b split.
    for (std::size_t k = 0; k + 1 < g; ++k) {
      double len = grid[k + 1] - grid[k];
      std::size_t a = prog.add_variable(len), b = prog.add_variable(len);
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t l = 0; l <= k; ++l) row.push_back({l, 1.0});
      row.push_back({a, -1.0});
      row.push_back({b, 1.0});
      prog.add_row(row, lp::Relation::Equal, mu.mass_upto(grid[k]));
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) fail(ErrorCode::LpInfeasible, "grid projection program has no optimum");
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < g; ++k) atoms.push_back({grid[k], sol.x[k]});
    GridProjection cur{DiscreteMeasure::from_signed(std::move(atoms), ErrorCode::NumericalFailure, tol), sol.objective,
                       g};
    bool settled = round > 0 && std::abs(best.objective - cur.objective) < 1e-8;
    best = std::move(cur);
    if (settled) break;
  }
  return best;
}

/// T* assembled from the projections of the two tails, identity in between.
inline MonotoneMap optimal_map(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const Tolerances& tol = kDefaultTol) {
  Decomposition d = decompose(mu, nu, tol);
  std::vector<MapSample> samples;
  for (const Atom& a : d.eta_zero.atoms()) samples.push_back({a.x, a.x});
  for (const auto* tail : {&d.eta_minus, &d.eta_plus}) {
    if (tail->empty()) continue;
    const DiscreteMeasure& target = tail == &d.eta_minus ? d.chi_minus : d.chi_plus;
    Projection pr = project_convex_order(*tail, target, tol);
    samples.insert(samples.end(), pr.map.samples().begin(), pr.map.samples().end());
  }
  return MonotoneMap(std::move(samples));
}

struct DisplacementReport {
  std::vector<MapSample> samples;  // (x, D(x)) with D = T(x) - x
  bool non_increasing = true;
  bool sign_pattern = true;
};

/// D(x) = T(x) - x at the samples, checked for monotonicity and, given the
/// cut-points, for D > 0 left of x^-, D = 0 between, D < 0 right of x^+.
inline DisplacementReport displacement_profile(const MonotoneMap& map, double x_minus = -kInf,
                                               double x_plus = kInf, double tol_grid = kDefaultTol.grid) {
  DisplacementReport r;
  for (const MapSample& s : map.samples()) r.samples.push_back({s.x, s.t - s.x});
  for (std::size_t i = 1; i < r.samples.size(); ++i)
    if (r.samples[i].t > r.samples[i - 1].t + tol_grid) r.non_increasing = false;
  for (const MapSample& s : r.samples) {
    bool ok = true;
    switch (region_of(s.x, x_minus, x_plus)) {
      case Region::Left: ok = s.t > -tol_grid; break;
      case Region::Middle: ok = std::abs(s.t) <= tol_grid; break;
      case Region::Right: ok = s.t < tol_grid; break;
    }
    r.sign_pattern = r.sign_pattern && ok;
  }
  return r;
}

/// sum_i h(x_i - T*(x_i)) mu_i.
inline double wot_value_general(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ConvexCost& h,
                                const Tolerances& tol = kDefaultTol) {
  MonotoneMap t = optimal_map(mu, nu, tol);
  double total = 0.0;
  for (const Atom& a : mu.atoms()) total += h(a.x - t(a.x)) * a.w;
  return total;
}

}  // namespace wot
