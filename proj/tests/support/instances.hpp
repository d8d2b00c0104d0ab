#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "wot/measure.hpp"

namespace wot::gen {

/// Atoms on the half-integer lattice in [-span, span] with masses in
/// multiples of 1/units summing to `total`.
inline DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t max_atoms, double total = 1.0,
                                      int span = 6, int units = 32) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::size_t n = count(rng);
  std::vector<int> lattice;
  for (int k = -2 * span; k <= 2 * span; ++k) lattice.push_back(k);
  std::shuffle(lattice.begin(), lattice.end(), rng);
  std::vector<int> share(n, 1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int u = static_cast<int>(n); u < units; ++u) ++share[pick(rng)];
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({lattice[i] / 2.0, total * share[i] / units});
  return DiscreteMeasure::from_atoms(std::move(atoms));
}

struct Instance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t max_atoms) {
  return {random_measure(rng, max_atoms), random_measure(rng, max_atoms)};
}

/// nu spread from mu by splitting every atom into a mean-preserving pair,
/// then shifted by `drift`. The pair satisfies mu <=_c nu for drift 0,
/// mu <=_ci nu for drift > 0 and mu <=_cd nu for drift < 0.
inline Instance ordered_instance(std::mt19937_64& rng, std::size_t max_atoms, double drift) {
  DiscreteMeasure mu = random_measure(rng, max_atoms);
  std::uniform_int_distribution<int> gap(0, 4);
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) {
    double d = gap(rng) / 2.0;
    atoms.push_back({a.x - d + drift, a.w / 2});
    atoms.push_back({a.x + d + drift, a.w / 2});
  }
  return {mu, DiscreteMeasure::from_atoms(std::move(atoms))};
}

}  // namespace wot::gen
