#pragma once

#include "wot/coupling.hpp"
#include "wot/decomposition.hpp"
#include "wot/order.hpp"
#include "wot/shadow.hpp"

namespace wot {

enum class Flavor { Increasing, Decreasing };
enum class Sense { Min, Max };

namespace detail {

inline Coupling lift_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& chi, LiftKind kind,
                              const Tolerances& tol) {
  if (eta.empty() && chi.empty()) return Coupling::from_entries(eta, chi, {}, tol);
  return shadow_coupling(make_lift(eta, kind), chi, tol).flattened;
}

inline LiftKind lift_for(Flavor f) { return f == Flavor::Increasing ? LiftKind::Ascending : LiftKind::Descending; }

}  // namespace detail

/// Left-curtain style martingale coupling from the ascending shadow lift.
inline Coupling martingale_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& chi,
                                    const Tolerances& tol = kDefaultTol) {
  if (!check_order(eta, chi, OrderRelation::Convex, tol))
    fail(ErrorCode::OrderViolation, "source is not dominated in convex order");
  return detail::lift_coupling(eta, chi, LiftKind::Ascending, tol);
}

inline Coupling submartingale_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& chi, Flavor flavor,
                                       const Tolerances& tol = kDefaultTol) {
  if (!check_order(eta, chi, OrderRelation::ConvexIncreasing, tol))
    fail(ErrorCode::OrderViolation, "source is not dominated in increasing convex order");
  return detail::lift_coupling(eta, chi, detail::lift_for(flavor), tol);
}

inline Coupling supermartingale_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& chi, Flavor flavor,
                                         const Tolerances& tol = kDefaultTol) {
  if (!check_order(eta, chi, OrderRelation::ConvexDecreasing, tol))
    fail(ErrorCode::OrderViolation, "source is not dominated in decreasing convex order");
  return detail::lift_coupling(eta, chi, detail::lift_for(flavor), tol);
}

/// Submartingale tail + martingale core + supermartingale tail.
inline Coupling assemble_pistar(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Flavor left, Flavor right,
                                const Tolerances& tol = kDefaultTol) {
  Decomposition d = decompose(mu, nu, tol);
  CouplingBuilder builder(mu, nu);
  builder.add(submartingale_coupling(d.eta_minus, d.chi_minus, left, tol));
  builder.add(martingale_coupling(d.eta_zero, d.chi_zero, tol));
  builder.add(supermartingale_coupling(d.eta_plus, d.chi_plus, right, tol));
  return builder.build(tol);
}

/// The optimal couplings with smallest or largest integral of x * y.
inline Coupling extremal_covariance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Sense sense,
                                    const Tolerances& tol = kDefaultTol) {
  if (sense == Sense::Min) return assemble_pistar(mu, nu, Flavor::Decreasing, Flavor::Increasing, tol);
  return assemble_pistar(mu, nu, Flavor::Increasing, Flavor::Decreasing, tol);
}

}  // namespace wot
