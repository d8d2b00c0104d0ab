#pragma once

namespace wot {

/// Numerical tolerances shared by all operations.
///
/// All arithmetic is sums and products of input positions and masses, so at
/// desk scale (tens of atoms, moderate magnitudes) `eps` dominates the
/// accumulated rounding error by several orders of magnitude.
struct Tolerances {
  double pos = 1e-12;       // atoms closer than this are merged
  double mass = 1e-12;      // masses at or below this are dropped
  double eps = 1e-9;        // potential inequalities, mass/mean equalities
  double grid = 1e-6;       // projection/map diagnostics
};

inline constexpr Tolerances kDefaultTol{};

}  // namespace wot
