#pragma once

#include <cmath>
#include <string_view>

#include "wot/errors.hpp"
#include "wot/measure.hpp"
#include "wot/pwl.hpp"

namespace wot {

enum class OrderRelation {
  Setwise,
  Convex,
  ConvexDecreasing,
  ConvexIncreasing,
  Stochastic,
  PosConvex,
  PosConvexDecreasing,
  PosConvexIncreasing,
};

constexpr std::string_view to_string(OrderRelation rel) {
  switch (rel) {
    case OrderRelation::Setwise: return "setwise";
    case OrderRelation::Convex: return "c";
    case OrderRelation::ConvexDecreasing: return "cd";
    case OrderRelation::ConvexIncreasing: return "ci";
    case OrderRelation::Stochastic: return "sto";
    case OrderRelation::PosConvex: return "pc";
    case OrderRelation::PosConvexDecreasing: return "pcd";
    case OrderRelation::PosConvexIncreasing: return "pci";
  }
  return "?";
}

namespace detail {

inline bool setwise_le(const DiscreteMeasure& a, const DiscreteMeasure& b, const Tolerances& tol) {
  for (const Atom& atom : a.atoms())
    if (atom.w > b.mass_at(atom.x, tol.pos) + tol.eps) return false;
  return true;
}

inline bool stochastic_le(const DiscreteMeasure& a, const DiscreteMeasure& b, const Tolerances& tol) {
  // F_a >= F_b; both are step functions jumping only at atoms.
  for (const DiscreteMeasure* m : {&a, &b})
    for (const Atom& atom : m->atoms())
      if (cdf(a, atom.x) < cdf(b, atom.x) - tol.eps) return false;
  return true;
}

}  // namespace detail

/// Decides a <= b in the given order through the potential-function criteria.
/// Throws MassMismatch when the relation's mass precondition fails.
inline bool check_order(const DiscreteMeasure& a, const DiscreteMeasure& b, OrderRelation rel,
                        const Tolerances& tol = kDefaultTol) {
  const double ma = a.mass(), mb = b.mass();
  switch (rel) {
    case OrderRelation::Setwise:
      return detail::setwise_le(a, b, tol);
    case OrderRelation::Convex:
    case OrderRelation::ConvexDecreasing:
    case OrderRelation::ConvexIncreasing:
    case OrderRelation::Stochastic:
      if (std::abs(ma - mb) > tol.eps)
        fail(ErrorCode::MassMismatch, std::string(to_string(rel)) + " order needs equal masses");
      break;
    default:
      if (ma > mb + tol.eps)
        fail(ErrorCode::MassMismatch, std::string(to_string(rel)) + " order needs mass(a) <= mass(b)");
      break;
  }
  switch (rel) {
    case OrderRelation::Convex:
      return std::abs(a.mean() - b.mean()) <= tol.eps && dominated(put_potential(a), put_potential(b), tol.eps);
    case OrderRelation::ConvexDecreasing:
    case OrderRelation::PosConvexDecreasing:
      return dominated(put_potential(a), put_potential(b), tol.eps);
    case OrderRelation::ConvexIncreasing:
    case OrderRelation::PosConvexIncreasing:
      return dominated(call_potential(a), call_potential(b), tol.eps);
    case OrderRelation::PosConvex:
      return dominated(put_potential(a), put_potential(b), tol.eps) &&
             dominated(call_potential(a), call_potential(b), tol.eps);
    case OrderRelation::Stochastic:
      return detail::stochastic_le(a, b, tol);
    default:
      return false;
  }
}

}  // namespace wot
