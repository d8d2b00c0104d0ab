#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "wot/errors.hpp"
#include "wot/tolerance.hpp"

namespace wot {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double x = 0.0;
  double w = 0.0;
};

struct Moments {
  double mass = 0.0;
  double mean = 0.0;  // unnormalized first moment
};

/// Finitely supported nonnegative measure on the real line.
///
/// Atoms are kept sorted by strictly increasing position and every stored
/// mass is positive. Instances are immutable values.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Sorts, merges atoms closer than `tol.pos`, drops masses <= `tol.mass`.
  /// Throws NegativeMass on any negative mass.
  static DiscreteMeasure from_atoms(std::vector<Atom> raw, const Tolerances& tol = kDefaultTol) {
    for (const Atom& a : raw) {
      if (!(a.w >= 0.0))
        fail(ErrorCode::NegativeMass, "atom at " + std::to_string(a.x) + " has mass " + std::to_string(a.w));
      if (!std::isfinite(a.x) || !std::isfinite(a.w))
        fail(ErrorCode::Parse, "non-finite atom");
    }
    return normalize(std::move(raw), tol);
  }

  /// As `from_atoms`, but masses in [-tol.eps, 0) are treated as rounding
  /// residue and dropped. Larger negative masses raise `code`.
  static DiscreteMeasure from_signed(std::vector<Atom> raw, ErrorCode code, const Tolerances& tol = kDefaultTol) {
    for (Atom& a : raw) {
      if (a.w < 0.0) {
        if (a.w < -tol.eps)
          fail(code, "negative mass " + std::to_string(a.w) + " at " + std::to_string(a.x));
        a.w = 0.0;
      }
    }
    return normalize(std::move(raw), tol);
  }

  static DiscreteMeasure point(double x, double w = 1.0) { return from_atoms({{x, w}}); }

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  double mass() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.w;
    return s;
  }
  double mean() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.x * a.w;
    return s;
  }
  double barycenter() const { return empty() ? 0.0 : mean() / mass(); }
  double second_moment() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.x * a.x * a.w;
    return s;
  }
  double min_position() const { return empty() ? kInf : atoms_.front().x; }
  double max_position() const { return empty() ? -kInf : atoms_.back().x; }

  /// Index of the atom within `eps` of `x`, if any.
  std::optional<std::size_t> find(double x, double eps = kDefaultTol.pos) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x - eps,
                               [](const Atom& a, double v) { return a.x < v; });
    if (it != atoms_.end() && std::abs(it->x - x) <= eps)
      return static_cast<std::size_t>(it - atoms_.begin());
    return std::nullopt;
  }

  double mass_at(double x, double eps = kDefaultTol.pos) const {
    auto i = find(x, eps);
    return i ? atoms_[*i].w : 0.0;
  }

  /// eta((-inf, k)).
  double mass_below(double k) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      if (a.x >= k) break;
      s += a.w;
    }
    return s;
  }
  /// eta((-inf, k]).
  double mass_upto(double k) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      if (a.x > k) break;
      s += a.w;
    }
    return s;
  }

  DiscreteMeasure scaled(double factor) const {
    std::vector<Atom> out(atoms_.begin(), atoms_.end());
    for (Atom& a : out) a.w *= factor;
    return from_atoms(std::move(out));
  }

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Atom> all(a.atoms_.begin(), a.atoms_.end());
    all.insert(all.end(), b.atoms_.begin(), b.atoms_.end());
    return from_atoms(std::move(all));
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      os << (i ? ", " : "") << "(" << atoms_[i].x << ", " << atoms_[i].w << ")";
    os << "]";
    return os.str();
  }

 private:
  static DiscreteMeasure normalize(std::vector<Atom> raw, const Tolerances& tol) {
    std::stable_sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    DiscreteMeasure m;
    for (const Atom& a : raw) {
      if (!m.atoms_.empty() && a.x - m.atoms_.back().x <= tol.pos)
        m.atoms_.back().w += a.w;
      else
        m.atoms_.push_back(a);
    }
    std::erase_if(m.atoms_, [&](const Atom& a) { return a.w <= tol.mass; });
    return m;
  }

  std::vector<Atom> atoms_;
};

using Measure = DiscreteMeasure;

inline DiscreteMeasure make_measure(const std::vector<std::pair<double, double>>& raw,
                                    const Tolerances& tol = kDefaultTol) {
  std::vector<Atom> atoms;
  atoms.reserve(raw.size());
  for (auto [x, w] : raw) atoms.push_back({x, w});
  return DiscreteMeasure::from_atoms(std::move(atoms), tol);
}

inline Moments moments(const DiscreteMeasure& m) { return {m.mass(), m.mean()}; }

/// Atom-wise a - b. Negative residue beyond `tol.eps` raises `code`.
inline DiscreteMeasure subtract(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                ErrorCode code = ErrorCode::InternalInconsistency,
                                const Tolerances& tol = kDefaultTol) {
  std::vector<Atom> all(a.atoms().begin(), a.atoms().end());
  for (const Atom& x : b.atoms()) all.push_back({x.x, -x.w});
  // Merge by position before checking signs so cancellations are exact.
  std::stable_sort(all.begin(), all.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  std::vector<Atom> merged;
  for (const Atom& x : all) {
    if (!merged.empty() && x.x - merged.back().x <= tol.pos)
      merged.back().w += x.w;
    else
      merged.push_back(x);
  }
  return DiscreteMeasure::from_signed(std::move(merged), code, tol);
}

/// Restriction to the interval between `lo` and `hi` with the given closedness.
inline DiscreteMeasure restrict(const DiscreteMeasure& m, double lo, double hi, bool lo_closed, bool hi_closed) {
  if (lo > hi) fail(ErrorCode::BadInterval, "lo > hi");
  std::vector<Atom> out;
  for (const Atom& a : m.atoms()) {
    bool above = lo_closed ? a.x >= lo : a.x > lo;
    bool below = hi_closed ? a.x <= hi : a.x < hi;
    if (above && below) out.push_back(a);
  }
  return DiscreteMeasure::from_atoms(std::move(out));
}

/// Right-continuous distribution function F(k) = m((-inf, k]).
inline double cdf(const DiscreteMeasure& m, double k) { return m.mass_upto(k); }

/// Left-continuous generalized inverse G(u) = inf{x : F(x) >= u}, u in [0, mass].
/// G(0) is taken as the smallest atom.
inline double quantile(const DiscreteMeasure& m, double u, const Tolerances& tol = kDefaultTol) {
  double total = m.mass();
  if (m.empty() || u < -tol.mass || u > total + tol.eps)
    fail(ErrorCode::OutOfRange, "quantile level " + std::to_string(u) + " outside [0, " + std::to_string(total) + "]");
  double cum = 0.0;
  for (const Atom& a : m.atoms()) {
    cum += a.w;
    if (cum >= u - tol.mass) return a.x;
  }
  return m.max_position();
}

/// Integral of |G_a - G_b| over [0, mass], walking both quantile functions.
inline double wasserstein1(const DiscreteMeasure& a, const DiscreteMeasure& b, const Tolerances& tol = kDefaultTol) {
  if (std::abs(a.mass() - b.mass()) > tol.eps)
    fail(ErrorCode::MassMismatch, "wasserstein1 needs equal masses");
  std::size_t i = 0, j = 0;
  double ra = a.empty() ? 0.0 : a[0].w, rb = b.empty() ? 0.0 : b[0].w;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    double step = std::min(ra, rb);
    total += step * std::abs(a[i].x - b[j].x);
    ra -= step;
    rb -= step;
    if (ra <= tol.mass) {
      if (++i < a.size()) ra = a[i].w;
    }
    if (rb <= tol.mass) {
      if (++j < b.size()) rb = b[j].w;
    }
  }
  return total;
}

/// Atom lists agree within `tol.pos` in position and `eps_mass` in mass.
inline bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double eps_mass,
                         double eps_pos = kDefaultTol.pos) {
  // Atoms lighter than eps_mass may be present on one side only.
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && std::abs(a[i].x - b[j].x) <= eps_pos) {
      if (std::abs(a[i].w - b[j].w) > eps_mass) return false;
      ++i;
      ++j;
    } else if (j >= b.size() || (i < a.size() && a[i].x < b[j].x)) {
      if (a[i].w > eps_mass) return false;
      ++i;
    } else {
      if (b[j].w > eps_mass) return false;
      ++j;
    }
  }
  return true;
}

/// Largest atom-wise mass discrepancy between two measures.
inline double max_atom_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                   double eps_pos = kDefaultTol.pos) {
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && std::abs(a[i].x - b[j].x) <= eps_pos) {
      worst = std::max(worst, std::abs(a[i].w - b[j].w));
      ++i;
      ++j;
    } else if (j >= b.size() || (i < a.size() && a[i].x < b[j].x)) {
      worst = std::max(worst, a[i++].w);
    } else {
      worst = std::max(worst, b[j++].w);
    }
  }
  return worst;
}

}  // namespace wot
