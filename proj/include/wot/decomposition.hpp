#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "wot/coupling.hpp"
#include "wot/errors.hpp"
#include "wot/measure.hpp"
#include "wot/pwl.hpp"

namespace wot {

struct Constants {
  double p = 0.0;  // sup (P_mu - P_nu)
  double c = 0.0;  // sup (C_mu - C_nu)
};

struct Cutpoints {
  double x_minus = -kInf;
  double x_plus = kInf;
};

namespace detail {

inline void require_equal_mass(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Tolerances& tol,
                               const char* what) {
  if (std::abs(mu.mass() - nu.mass()) > tol.eps)
    fail(ErrorCode::MassMismatch, std::string(what) + " needs equal masses, got " + std::to_string(mu.mass()) +
                                      " and " + std::to_string(nu.mass()));
}

}  // namespace detail

inline Constants compute_constants(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const Tolerances& tol = kDefaultTol) {
  detail::require_equal_mass(mu, nu, tol, "compute_constants");
  double p = sup_gap(put_potential(mu), put_potential(nu), tol).value;
  double c = sup_gap(call_potential(mu), call_potential(nu), tol).value;
  return {std::max(0.0, p), std::max(0.0, c)};
}

/// Inf and sup of the contact set {P_nu + p = P_mu}, scanned at merged breakpoints.
inline Cutpoints compute_cutpoints(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const Tolerances& tol = kDefaultTol) {
  Constants k = compute_constants(mu, nu, tol);
  Cutpoints cut;
  bool lower = k.p > tol.eps, upper = k.c > tol.eps;
  if (!lower && !upper) return cut;
  PwlFunction gap = (put_potential(nu) - put_potential(mu)).add_constant(k.p);
  const auto& ks = gap.breakpoints();
  const auto& vs = gap.values();
  double first = kInf, last = -kInf;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (vs[i] <= tol.eps) {
      first = std::min(first, ks[i]);
      last = std::max(last, ks[i]);
    }
  }
  if (lower) {
    if (!std::isfinite(first)) fail(ErrorCode::InternalInconsistency, "empty contact set with p > 0");
    cut.x_minus = first;
  }
  if (upper) {
    if (!std::isfinite(last)) fail(ErrorCode::InternalInconsistency, "empty contact set with c > 0");
    cut.x_plus = last;
  }
  return cut;
}

/// Split of (mu, nu) into submartingale, martingale and supermartingale parts.
struct Decomposition {
  double p = 0.0;
  double c = 0.0;
  double x_minus = -kInf;
  double x_plus = kInf;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  // Atom coefficients placed on chi^- at x^- and on chi^+ at x^+, before clamping.
  double chi_minus_atom = 0.0;
  double chi_plus_atom = 0.0;
  DiscreteMeasure eta_minus, eta_zero, eta_plus;
  DiscreteMeasure chi_minus, chi_zero, chi_plus;
};

inline Decomposition decompose(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const Tolerances& tol = kDefaultTol) {
  Decomposition d;
  Constants k = compute_constants(mu, nu, tol);
  Cutpoints cut = compute_cutpoints(mu, nu, tol);
  d.p = k.p;
  d.c = k.c;
  d.x_minus = cut.x_minus;
  d.x_plus = cut.x_plus;

  auto checked = [&](double coef, const char* what) {
    if (coef < -tol.eps)
      fail(ErrorCode::InternalInconsistency, std::string(what) + " atom coefficient " + std::to_string(coef));
    return std::max(0.0, coef);
  };

  if (std::isfinite(d.x_minus)) {
    d.eta_minus = restrict(mu, -kInf, d.x_minus, false, false);
    d.delta_minus = mu.mass_below(d.x_minus);
    d.chi_minus_atom = d.delta_minus - nu.mass_below(d.x_minus);
    std::vector<Atom> atoms;
    for (const Atom& a : nu.atoms())
      if (a.x < d.x_minus) atoms.push_back(a);
    atoms.push_back({d.x_minus, checked(d.chi_minus_atom, "chi^-")});
    d.chi_minus = DiscreteMeasure::from_atoms(std::move(atoms), tol);
  }
  if (std::isfinite(d.x_plus)) {
    d.eta_plus = restrict(mu, d.x_plus, kInf, false, false);
    d.delta_plus = mu.mass_upto(d.x_plus);
    d.chi_plus_atom = nu.mass_upto(d.x_plus) - d.delta_plus;
    std::vector<Atom> atoms;
    for (const Atom& a : nu.atoms())
      if (a.x > d.x_plus) atoms.push_back(a);
    atoms.push_back({d.x_plus, checked(d.chi_plus_atom, "chi^+")});
    d.chi_plus = DiscreteMeasure::from_atoms(std::move(atoms), tol);
  } else {
    d.delta_plus = mu.mass();
  }
  d.eta_zero = subtract(subtract(mu, d.eta_minus, ErrorCode::InternalInconsistency, tol), d.eta_plus,
                        ErrorCode::InternalInconsistency, tol);
  d.chi_zero = subtract(subtract(nu, d.chi_minus, ErrorCode::InternalInconsistency, tol), d.chi_plus,
                        ErrorCode::InternalInconsistency, tol);
  return d;
}

/// Closed-form WOT value for the cost |x - barycenter|.
inline double wot_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Tolerances& tol = kDefaultTol) {
  Constants k = compute_constants(mu, nu, tol);
  if (k.p <= tol.eps || k.c <= tol.eps) return std::abs(mu.mean() - nu.mean());
  Decomposition d = decompose(mu, nu, tol);
  return (d.chi_minus.mean() - d.eta_minus.mean()) + (d.eta_plus.mean() - d.chi_plus.mean());
}

enum class Region { Left, Middle, Right };

inline Region region_of(double x, double x_minus, double x_plus) {
  if (x < x_minus) return Region::Left;
  if (x > x_plus) return Region::Right;
  return Region::Middle;
}

/// Whether target position y may receive mass from a source atom in region r.
inline bool region_allows(Region r, double y, double x_minus, double x_plus, double pos_tol = kDefaultTol.pos) {
  switch (r) {
    case Region::Left: return y <= x_minus + pos_tol;
    case Region::Middle: return y >= x_minus - pos_tol && y <= x_plus + pos_tol;
    case Region::Right: return y >= x_plus - pos_tol;
  }
  return false;
}

/// Largest violation of the optimal-set conditions: barycenter sign errors
/// (per unit mass) and mass sent outside the permitted region.
inline double pistar_violation(const Coupling& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const Tolerances& tol = kDefaultTol) {
  if (!approx_equal(pi.source(), mu, tol.eps) || !approx_equal(pi.target(), nu, tol.eps))
    fail(ErrorCode::MarginalMismatch, "coupling marginals differ from (mu, nu)");
  Cutpoints cut = compute_cutpoints(mu, nu, tol);
  auto bary = barycenters(pi);
  std::vector<double> stray(pi.source().size(), 0.0);
  for (const auto& e : pi.entries()) {
    Region r = region_of(pi.source()[e.i].x, cut.x_minus, cut.x_plus);
    if (!region_allows(r, pi.target()[e.j].x, cut.x_minus, cut.x_plus, tol.pos)) stray[e.i] += e.m;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < bary.size(); ++i) {
    double gap = bary[i].barycenter - bary[i].x;
    double v = 0.0;
    switch (region_of(bary[i].x, cut.x_minus, cut.x_plus)) {
      case Region::Left: v = std::max(0.0, -gap); break;
      case Region::Middle: v = std::abs(gap); break;
      case Region::Right: v = std::max(0.0, gap); break;
    }
    worst = std::max({worst, v, stray[i]});
  }
  return worst;
}

inline bool is_pistar_member(const Coupling& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const Tolerances& tol = kDefaultTol) {
  return pistar_violation(pi, mu, nu, tol) <= tol.eps;
}

}  // namespace wot
