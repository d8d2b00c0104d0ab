#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wot/coupling.hpp"
#include "wot/decomposition.hpp"
#include "wot/errors.hpp"
#include "wot/measure.hpp"
#include "wot/pwl.hpp"

namespace wot {

namespace detail {

inline void require_mass_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Tolerances& tol) {
  if (mu.mass() > nu.mass() + tol.eps)
    fail(ErrorCode::MassOrder, "source mass " + std::to_string(mu.mass()) + " exceeds target mass " +
                                   std::to_string(nu.mass()));
}

}  // namespace detail

/// p_theta = sup (P_mu - P_theta), c_theta = sup (C_mu - C_theta).
inline Constants target_stats(const DiscreteMeasure& theta, const DiscreteMeasure& mu,
                              const Tolerances& tol = kDefaultTol) {
  return compute_constants(mu, theta, tol);
}

/// The shadow of mu in nu, through P_S = P_nu - hull(P_nu - P_mu) - p.
inline DiscreteMeasure shadow(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const Tolerances& tol = kDefaultTol) {
  detail::require_mass_order(mu, nu, tol);
  if (mu.empty()) return {};
  PwlFunction pmu = put_potential(mu), pnu = put_potential(nu);
  double p = std::max(0.0, sup_gap(pmu, pnu, tol).value);
  double c = std::max(0.0, sup_gap(call_potential(mu), call_potential(nu), tol).value);
  PwlFunction hull = convex_hull(pnu - pmu, tol);
  PwlFunction ps = (pnu - hull).add_constant(-p);
  return second_derivative_measure(ps, mu.mass(), mu.mean() + p - c, tol);
}

struct AssociativityReport {
  double discrepancy = 0.0;  // max atom-wise difference of the two sides
  double p_gap = 0.0;        // |p_S(mu) - p_S(mu1) - p_S'(mu2)|
  bool ok = false;
};

/// Compares S(mu1 + mu2, nu) with S(mu1, nu) + S(mu2, nu - S(mu1, nu)).
inline AssociativityReport shadow_associativity(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                                const DiscreteMeasure& nu, const Tolerances& tol = kDefaultTol) {
  DiscreteMeasure whole = mu1 + mu2;
  detail::require_mass_order(whole, nu, tol);
  DiscreteMeasure s = shadow(whole, nu, tol);
  DiscreteMeasure s1 = shadow(mu1, nu, tol);
  DiscreteMeasure rest = subtract(nu, s1, ErrorCode::NegativeRemainder, tol);
  DiscreteMeasure s2 = shadow(mu2, rest, tol);
  AssociativityReport r;
  r.discrepancy = max_atom_discrepancy(s, s1 + s2, tol.pos);
  auto p_of = [&](const DiscreteMeasure& src, const DiscreteMeasure& img) {
    return src.empty() ? 0.0 : target_stats(img, src, tol).p;
  };
  r.p_gap = std::abs(p_of(whole, s) - p_of(mu1, s1) - p_of(mu2, s2));
  r.ok = r.discrepancy <= tol.eps && r.p_gap <= tol.eps;
  return r;
}

inline bool shadow_residual_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                  const DiscreteMeasure& nu, const Tolerances& tol = kDefaultTol) {
  return shadow_associativity(mu1, mu2, nu, tol).ok;
}

struct Slice {
  double m = 0.0;
  double x = 0.0;
};

/// Ordered atomic slices of a measure; prefixes are the lift's parametrization.
struct Lift {
  std::vector<Slice> slices;

  double mass() const {
    return std::accumulate(slices.begin(), slices.end(), 0.0, [](double s, const Slice& sl) { return s + sl.m; });
  }

  DiscreteMeasure flatten(const Tolerances& tol = kDefaultTol) const { return prefix(slices.size(), tol); }

  /// The first `k` slices as a measure.
  DiscreteMeasure prefix(std::size_t k, const Tolerances& tol = kDefaultTol) const {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < k && i < slices.size(); ++i) atoms.push_back({slices[i].x, slices[i].m});
    return DiscreteMeasure::from_atoms(std::move(atoms), tol);
  }

  /// The prefix carrying cumulative mass u * mass(), splitting a slice if needed.
  DiscreteMeasure prefix_fraction(double u, const Tolerances& tol = kDefaultTol) const {
    if (!(u >= 0.0 && u <= 1.0)) fail(ErrorCode::OutOfRange, "lift parameter " + std::to_string(u) + " outside [0, 1]");
    double budget = u * mass();
    std::vector<Atom> atoms;
    for (const Slice& s : slices) {
      if (budget <= tol.mass) break;
      double take = std::min(s.m, budget);
      atoms.push_back({s.x, take});
      budget -= take;
    }
    return DiscreteMeasure::from_atoms(std::move(atoms), tol);
  }
};

enum class LiftKind { Ascending, Descending };

inline Lift make_lift(const DiscreteMeasure& mu, LiftKind kind) {
  Lift lift;
  for (const Atom& a : mu.atoms()) lift.slices.push_back({a.w, a.x});
  if (kind == LiftKind::Descending) std::reverse(lift.slices.begin(), lift.slices.end());
  return lift;
}

/// Custom ordering given as a permutation of atom indices.
inline Lift make_lift(const DiscreteMeasure& mu, const std::vector<std::size_t>& order) {
  if (order.size() != mu.size()) fail(ErrorCode::BadOrder, "order length differs from the number of atoms");
  std::vector<char> seen(mu.size(), 0);
  Lift lift;
  for (std::size_t i : order) {
    if (i >= mu.size() || seen[i]) fail(ErrorCode::BadOrder, "order is not a permutation of atom indices");
    seen[i] = 1;
    lift.slices.push_back({mu[i].w, mu[i].x});
  }
  return lift;
}

/// Custom ordering given as explicit slices, possibly splitting atoms.
inline Lift make_lift(const DiscreteMeasure& mu, const std::vector<Slice>& slices,
                      const Tolerances& tol = kDefaultTol) {
  std::vector<double> used(mu.size(), 0.0);
  for (const Slice& s : slices) {
    if (!(s.m > 0.0)) fail(ErrorCode::BadOrder, "slice mass must be positive");
    auto i = mu.find(s.x, tol.pos);
    if (!i) fail(ErrorCode::BadOrder, "slice at " + std::to_string(s.x) + " is not an atom");
    used[*i] += s.m;
  }
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(used[i] - mu[i].w) > tol.eps)
      fail(ErrorCode::BadOrder, "slices do not exhaust the atom at " + std::to_string(mu[i].x));
  return Lift{slices};
}

struct ShadowStep {
  double x = 0.0;
  double m = 0.0;
  DiscreteMeasure increment;
};

struct LiftedCoupling {
  std::vector<ShadowStep> steps;
  Coupling flattened;
};

/// Sends each slice to its shadow in what remains of nu.
inline LiftedCoupling shadow_coupling(const Lift& lift, const DiscreteMeasure& nu,
                                      const Tolerances& tol = kDefaultTol) {
  DiscreteMeasure mu = lift.flatten(tol);
  detail::require_equal_mass(mu, nu, tol, "shadow_coupling");
  LiftedCoupling out;
  CouplingBuilder builder(mu, nu);
  DiscreteMeasure rest = nu;
  for (const Slice& s : lift.slices) {
    DiscreteMeasure inc = shadow(DiscreteMeasure::point(s.x, s.m), rest, tol);
    for (const Atom& a : inc.atoms()) builder.add(s.x, a.x, a.w);
    rest = subtract(rest, inc, ErrorCode::NegativeRemainder, tol);
    out.steps.push_back({s.x, s.m, std::move(inc)});
  }
  out.flattened = builder.build(tol);
  return out;
}

/// Largest atom-wise gap between the accumulated increments and the shadow of
/// each prefix, over all slice boundaries.
inline double prefix_shadow_discrepancy(const Lift& lift, const LiftedCoupling& lc, const DiscreteMeasure& nu,
                                        const Tolerances& tol = kDefaultTol) {
  double worst = 0.0;
  DiscreteMeasure acc;
  for (std::size_t k = 0; k < lc.steps.size(); ++k) {
    acc = acc + lc.steps[k].increment;
    worst = std::max(worst, max_atom_discrepancy(acc, shadow(lift.prefix(k + 1, tol), nu, tol), tol.pos));
  }
  return worst;
}

/// Shadow of the lift prefix at u against nu, versus the sum of the regional
/// shadows of its restrictions against chi^-, chi^0, chi^+.
inline double region_decomposition_gap(const Lift& lift, const DiscreteMeasure& nu, double u,
                                       const Tolerances& tol = kDefaultTol) {
  DiscreteMeasure mu = lift.flatten(tol);
  Decomposition d = decompose(mu, nu, tol);
  DiscreteMeasure pre = lift.prefix_fraction(u, tol);
  DiscreteMeasure global = shadow(pre, nu, tol);
  DiscreteMeasure left = restrict(pre, -kInf, d.x_minus, false, false);
  DiscreteMeasure right = restrict(pre, d.x_plus, kInf, false, false);
  DiscreteMeasure mid = subtract(subtract(pre, left, ErrorCode::InternalInconsistency, tol), right,
                                 ErrorCode::InternalInconsistency, tol);
  DiscreteMeasure parts = shadow(left, d.chi_minus, tol) + shadow(mid, d.chi_zero, tol) + shadow(right, d.chi_plus, tol);
  return max_atom_discrepancy(global, parts, tol.pos);
}

inline bool region_decomposition_check(const Lift& lift, const DiscreteMeasure& nu, double u,
                                       const Tolerances& tol = kDefaultTol) {
  return region_decomposition_gap(lift, nu, u, tol) <= tol.eps;
}

}  // namespace wot
