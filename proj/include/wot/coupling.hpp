#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "wot/errors.hpp"
#include "wot/measure.hpp"

namespace wot {

/// Nonnegative sparse matrix over source x target atoms with prescribed marginals.
class Coupling {
 public:
  struct Entry {
    std::size_t i = 0;
    std::size_t j = 0;
    double m = 0.0;
  };

  Coupling() = default;

  /// Merges duplicate (i, j) pairs, clamps rounding residue, and verifies both
  /// marginals within `tol.eps`. Throws MarginalMismatch otherwise.
  static Coupling from_entries(DiscreteMeasure source, DiscreteMeasure target, const std::vector<Entry>& raw,
                               const Tolerances& tol = kDefaultTol) {
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const Entry& e : raw) {
      if (e.i >= source.size() || e.j >= target.size())
        fail(ErrorCode::DimensionMismatch, "coupling entry outside the supports");
      acc[{e.i, e.j}] += e.m;
    }
    Coupling c;
    c.source_ = std::move(source);
    c.target_ = std::move(target);
    for (auto [key, m] : acc) {
      if (m < -tol.eps) fail(ErrorCode::MarginalMismatch, "negative coupling entry " + std::to_string(m));
      if (m > tol.mass) c.entries_.push_back({key.first, key.second, m});
    }
    c.validate(tol);
    return c;
  }

  static Coupling from_dense(DiscreteMeasure source, DiscreteMeasure target,
                             const std::vector<std::vector<double>>& matrix, const Tolerances& tol = kDefaultTol) {
    if (matrix.size() != source.size()) fail(ErrorCode::DimensionMismatch, "row count differs from source size");
    std::vector<Entry> raw;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
      if (matrix[i].size() != target.size()) fail(ErrorCode::DimensionMismatch, "column count differs from target");
      for (std::size_t j = 0; j < matrix[i].size(); ++j)
        if (matrix[i][j] != 0.0) raw.push_back({i, j, matrix[i][j]});
    }
    return from_entries(std::move(source), std::move(target), raw, tol);
  }

  static Coupling identity(const DiscreteMeasure& m) {
    std::vector<Entry> raw;
    for (std::size_t i = 0; i < m.size(); ++i) raw.push_back({i, i, m[i].w});
    return from_entries(m, m, raw);
  }

  /// a (x) b / mass; requires equal masses.
  static Coupling product(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Entry> raw;
    double total = b.mass();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) raw.push_back({i, j, a[i].w * b[j].w / total});
    return from_entries(a, b, raw);
  }

  const DiscreteMeasure& source() const { return source_; }
  const DiscreteMeasure& target() const { return target_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<std::vector<double>> dense() const {
    std::vector<std::vector<double>> d(source_.size(), std::vector<double>(target_.size(), 0.0));
    for (const Entry& e : entries_) d[e.i][e.j] += e.m;
    return d;
  }

  std::vector<double> row_sums() const {
    std::vector<double> r(source_.size(), 0.0);
    for (const Entry& e : entries_) r[e.i] += e.m;
    return r;
  }
  std::vector<double> col_sums() const {
    std::vector<double> c(target_.size(), 0.0);
    for (const Entry& e : entries_) c[e.j] += e.m;
    return c;
  }

  /// Worst marginal error over rows and columns.
  double marginal_error() const {
    double worst = 0.0;
    auto r = row_sums();
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - source_[i].w));
    auto c = col_sums();
    for (std::size_t j = 0; j < c.size(); ++j) worst = std::max(worst, std::abs(c[j] - target_[j].w));
    return worst;
  }

  /// Convex combination lambda * a + (1 - lambda) * b of couplings on the same marginals.
  friend Coupling mix(const Coupling& a, const Coupling& b, double lambda) {
    std::vector<Entry> raw;
    for (const Entry& e : a.entries_) raw.push_back({e.i, e.j, lambda * e.m});
    for (const Entry& e : b.entries_) raw.push_back({e.i, e.j, (1.0 - lambda) * e.m});
    return from_entries(a.source_, a.target_, raw);
  }

 private:
  void validate(const Tolerances& tol) const {
    double err = marginal_error();
    if (err > tol.eps) fail(ErrorCode::MarginalMismatch, "marginal error " + std::to_string(err));
  }

  DiscreteMeasure source_;
  DiscreteMeasure target_;
  std::vector<Entry> entries_;
};

/// Accumulates couplings of sub-measures into one coupling of parent measures,
/// matching atoms by position.
class CouplingBuilder {
 public:
  CouplingBuilder(DiscreteMeasure source, DiscreteMeasure target)
      : source_(std::move(source)), target_(std::move(target)) {}

  void add(double x, double y, double m) {
    auto i = source_.find(x), j = target_.find(y);
    if (!i || !j) fail(ErrorCode::InternalInconsistency, "component atom not found in parent measure");
    raw_.push_back({*i, *j, m});
  }

  void add(const Coupling& part) {
    for (const auto& e : part.entries()) add(part.source()[e.i].x, part.target()[e.j].x, e.m);
  }

  Coupling build(const Tolerances& tol = kDefaultTol) const {
    return Coupling::from_entries(source_, target_, raw_, tol);
  }

 private:
  DiscreteMeasure source_;
  DiscreteMeasure target_;
  std::vector<Coupling::Entry> raw_;
};

struct RowBarycenter {
  double x = 0.0;
  double barycenter = 0.0;
};

/// Conditional means of each row.
inline std::vector<RowBarycenter> barycenters(const Coupling& pi) {
  std::vector<double> first(pi.source().size(), 0.0);
  for (const auto& e : pi.entries()) first[e.i] += pi.target()[e.j].x * e.m;
  std::vector<RowBarycenter> out;
  for (std::size_t i = 0; i < first.size(); ++i) out.push_back({pi.source()[i].x, first[i] / pi.source()[i].w});
  return out;
}

/// sum_i | x_i mu_i - sum_j y_j pi_ij |, the barycentric L1 transport cost.
inline double barycentric_cost(const Coupling& pi) {
  std::vector<double> first(pi.source().size(), 0.0);
  for (const auto& e : pi.entries()) first[e.i] += pi.target()[e.j].x * e.m;
  double total = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) total += std::abs(pi.source()[i].x * pi.source()[i].w - first[i]);
  return total;
}

using CostMatrix = std::vector<std::vector<double>>;

inline CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target,
                              const std::function<double(double, double)>& c) {
  CostMatrix out(source.size(), std::vector<double>(target.size()));
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j) out[i][j] = c(source[i].x, target[j].x);
  return out;
}

inline double cost_integral(const Coupling& pi, const CostMatrix& cost) {
  if (cost.size() != pi.source().size()) fail(ErrorCode::DimensionMismatch, "cost rows differ from source size");
  for (const auto& row : cost)
    if (row.size() != pi.target().size()) fail(ErrorCode::DimensionMismatch, "cost columns differ from target size");
  double total = 0.0;
  for (const auto& e : pi.entries()) total += cost[e.i][e.j] * e.m;
  return total;
}

inline double covariance_integral(const Coupling& pi) {
  double total = 0.0;
  for (const auto& e : pi.entries()) total += pi.source()[e.i].x * pi.target()[e.j].x * e.m;
  return total;
}

/// The coupling restricted to source atoms accepted by `keep`; its target is
/// the column sums of the kept rows.
inline Coupling restrict_rows(const Coupling& pi, const std::function<bool(double)>& keep) {
  std::vector<Atom> src, tgt;
  for (const Atom& a : pi.source().atoms())
    if (keep(a.x)) src.push_back(a);
  std::vector<double> cols(pi.target().size(), 0.0);
  for (const auto& e : pi.entries())
    if (keep(pi.source()[e.i].x)) cols[e.j] += e.m;
  for (std::size_t j = 0; j < cols.size(); ++j) tgt.push_back({pi.target()[j].x, cols[j]});
  CouplingBuilder builder(DiscreteMeasure::from_atoms(std::move(src)), DiscreteMeasure::from_atoms(std::move(tgt)));
  for (const auto& e : pi.entries())
    if (keep(pi.source()[e.i].x)) builder.add(pi.source()[e.i].x, pi.target()[e.j].x, e.m);
  return builder.build();
}

enum class MonotonicityTag { FirstLeft, FirstRight, SecondLeft, SecondRight };
enum class Regime { Sub, Super };

constexpr std::string_view to_string(MonotonicityTag t) {
  switch (t) {
    case MonotonicityTag::FirstLeft: return "first_left";
    case MonotonicityTag::FirstRight: return "first_right";
    case MonotonicityTag::SecondLeft: return "second_left";
    case MonotonicityTag::SecondRight: return "second_right";
  }
  return "?";
}

/// Source positions whose row barycenter equals the position.
inline std::vector<double> martingale_points(const Coupling& pi, double eps = kDefaultTol.eps) {
  std::vector<double> out;
  for (const auto& rb : barycenters(pi))
    if (std::abs(rb.barycenter - rb.x) <= eps) out.push_back(rb.x);
  return out;
}

struct MonotonicityKind {
  MonotonicityTag tag = MonotonicityTag::SecondLeft;
  Regime regime = Regime::Super;
  std::vector<double> martingale_points;  // the set M
};

/// Exhaustive scan of the support for the pair/triple monotonicity patterns.
inline bool check_monotonicity(const Coupling& pi, const MonotonicityKind& kind,
                               const Tolerances& tol = kDefaultTol) {
  struct Pt {
    double x, y;
  };
  std::vector<Pt> support;
  for (const auto& e : pi.entries()) support.push_back({pi.source()[e.i].x, pi.target()[e.j].x});
  auto in_m = [&](double x) {
    return std::any_of(kind.martingale_points.begin(), kind.martingale_points.end(),
                       [&](double m) { return std::abs(m - x) <= tol.pos; });
  };

  switch (kind.tag) {
    case MonotonicityTag::SecondLeft:
    case MonotonicityTag::SecondRight: {
      bool left = kind.tag == MonotonicityTag::SecondLeft;
      for (const Pt& a : support)
        for (const Pt& b : support) {
          if (std::abs(a.x - b.x) > tol.pos || !(a.y < b.y - tol.pos)) continue;
          for (const Pt& c : support) {
            bool side = left ? c.x > a.x + tol.pos : c.x < a.x - tol.pos;
            if (side && c.y > a.y + tol.pos && c.y < b.y - tol.pos) return false;
          }
        }
      return true;
    }
    case MonotonicityTag::FirstLeft:
    case MonotonicityTag::FirstRight: {
      for (const Pt& p1 : support)
        for (const Pt& p2 : support) {
          if (!(p1.x < p2.x - tol.pos)) continue;
          if (kind.tag == MonotonicityTag::FirstLeft) {
            bool applies = kind.regime == Regime::Super ? !in_m(p2.x) : !in_m(p1.x);
            if (applies && p1.y > p2.y + tol.pos) return false;
          } else {
            bool applies = kind.regime == Regime::Super ? !in_m(p1.x) : !in_m(p2.x);
            if (applies && p2.y > p1.y + tol.pos) return false;
          }
        }
      return true;
    }
  }
  return true;
}

}  // namespace wot
