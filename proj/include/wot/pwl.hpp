#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "wot/errors.hpp"
#include "wot/measure.hpp"
#include "wot/tolerance.hpp"

namespace wot {

/// Continuous piecewise-linear function on the real line.
///
/// Stored as values at strictly increasing breakpoints, linear in between,
/// with explicit asymptotic slopes on the two outer rays. With no breakpoints
/// the function is affine: `slope_left() * k + intercept`.
class PwlFunction {
 public:
  PwlFunction() = default;

  static PwlFunction affine(double slope, double intercept) {
    PwlFunction f;
    f.slope_left_ = f.slope_right_ = slope;
    f.intercept_ = intercept;
    return f;
  }

  static PwlFunction from_points(std::vector<double> ks, std::vector<double> vs, double slope_left,
                                 double slope_right) {
    if (ks.size() != vs.size()) fail(ErrorCode::DimensionMismatch, "breakpoints and values differ in length");
    for (std::size_t i = 1; i < ks.size(); ++i)
      if (!(ks[i] > ks[i - 1])) fail(ErrorCode::InternalInconsistency, "breakpoints must increase strictly");
    if (ks.empty()) {
      if (slope_left != slope_right) fail(ErrorCode::InternalInconsistency, "affine function needs one slope");
      return affine(slope_left, 0.0);
    }
    PwlFunction f;
    f.k_ = std::move(ks);
    f.v_ = std::move(vs);
    f.slope_left_ = slope_left;
    f.slope_right_ = slope_right;
    return f;
  }

  const std::vector<double>& breakpoints() const { return k_; }
  const std::vector<double>& values() const { return v_; }
  double slope_left() const { return slope_left_; }
  double slope_right() const { return slope_right_; }
  bool is_affine() const { return k_.empty(); }

  double operator()(double k) const { return evaluate(k); }

  double evaluate(double k) const {
    if (k_.empty()) return slope_left_ * k + intercept_;
    if (k <= k_.front()) return v_.front() + slope_left_ * (k - k_.front());
    if (k >= k_.back()) return v_.back() + slope_right_ * (k - k_.back());
    auto it = std::upper_bound(k_.begin(), k_.end(), k);
    std::size_t i = static_cast<std::size_t>(it - k_.begin());
    double t = (k - k_[i - 1]) / (k_[i] - k_[i - 1]);
    // Exact at both ends of the segment.
    return v_[i - 1] + t * (v_[i] - v_[i - 1]);
  }

  /// Slope of segment i, where segment 0 is the left ray and segment
  /// breakpoints().size() is the right ray.
  double segment_slope(std::size_t i) const {
    if (i == 0) return slope_left_;
    if (i >= k_.size()) return slope_right_;
    return (v_[i] - v_[i - 1]) / (k_[i] - k_[i - 1]);
  }

  double left_derivative(double k) const {
    if (k_.empty()) return slope_left_;
    auto it = std::lower_bound(k_.begin(), k_.end(), k);
    return segment_slope(static_cast<std::size_t>(it - k_.begin()));
  }
  double right_derivative(double k) const {
    if (k_.empty()) return slope_right_;
    auto it = std::upper_bound(k_.begin(), k_.end(), k);
    return segment_slope(static_cast<std::size_t>(it - k_.begin()));
  }

  bool is_convex(double eps = kDefaultTol.eps) const {
    for (std::size_t i = 1; i <= k_.size(); ++i)
      if (segment_slope(i) < segment_slope(i - 1) - eps) return false;
    return true;
  }

  PwlFunction add_constant(double a) const {
    PwlFunction f = *this;
    for (double& v : f.v_) v += a;
    f.intercept_ += a;
    return f;
  }

  PwlFunction scaled(double a) const {
    PwlFunction f = *this;
    for (double& v : f.v_) v *= a;
    f.intercept_ *= a;
    f.slope_left_ *= a;
    f.slope_right_ *= a;
    return f;
  }

  friend PwlFunction combine(const PwlFunction& f, const PwlFunction& g, double a, double b) {
    std::vector<double> ks;
    std::merge(f.k_.begin(), f.k_.end(), g.k_.begin(), g.k_.end(), std::back_inserter(ks));
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.empty()) {
      PwlFunction h = affine(a * f.slope_left_ + b * g.slope_left_, a * f.intercept_ + b * g.intercept_);
      return h;
    }
    std::vector<double> vs(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) vs[i] = a * f.evaluate(ks[i]) + b * g.evaluate(ks[i]);
    return from_points(std::move(ks), std::move(vs), a * f.slope_left_ + b * g.slope_left_,
                       a * f.slope_right_ + b * g.slope_right_);
  }

  friend PwlFunction operator-(const PwlFunction& f, const PwlFunction& g) { return combine(f, g, 1.0, -1.0); }
  friend PwlFunction operator+(const PwlFunction& f, const PwlFunction& g) { return combine(f, g, 1.0, 1.0); }

 private:
  std::vector<double> k_;
  std::vector<double> v_;
  double slope_left_ = 0.0;
  double slope_right_ = 0.0;
  double intercept_ = 0.0;
};

inline PwlFunction subtract(const PwlFunction& f, const PwlFunction& g) { return f - g; }
inline PwlFunction add_constant(const PwlFunction& f, double a) { return f.add_constant(a); }
inline double evaluate(const PwlFunction& f, double k) { return f.evaluate(k); }

/// P(k) = sum_i w_i (k - x_i)^+.
inline PwlFunction put_potential(const DiscreteMeasure& m) {
  if (m.empty()) return PwlFunction::affine(0.0, 0.0);
  std::vector<double> ks, vs;
  double below_mass = 0.0, below_mean = 0.0;
  for (const Atom& a : m.atoms()) {
    ks.push_back(a.x);
    vs.push_back(below_mass * a.x - below_mean);
    below_mass += a.w;
    below_mean += a.w * a.x;
  }
  return PwlFunction::from_points(std::move(ks), std::move(vs), 0.0, m.mass());
}

/// C(k) = sum_i w_i (x_i - k)^+.
inline PwlFunction call_potential(const DiscreteMeasure& m) {
  if (m.empty()) return PwlFunction::affine(0.0, 0.0);
  auto atoms = m.atoms();
  std::vector<double> ks(atoms.size()), vs(atoms.size());
  double above_mass = 0.0, above_mean = 0.0;
  for (std::size_t r = atoms.size(); r-- > 0;) {
    ks[r] = atoms[r].x;
    vs[r] = above_mean - above_mass * atoms[r].x;
    above_mass += atoms[r].w;
    above_mean += atoms[r].w * atoms[r].x;
  }
  return PwlFunction::from_points(std::move(ks), std::move(vs), -m.mass(), 0.0);
}

/// U(k) = sum_i w_i |k - x_i|.
inline PwlFunction u_potential(const DiscreteMeasure& m) { return call_potential(m) + put_potential(m); }

/// Largest convex minorant.
///
/// Lower monotone chain over the breakpoints, then the outer chain segments
/// that are not steeper than the asymptotic rays are absorbed into the rays.
inline PwlFunction convex_hull(const PwlFunction& f, const Tolerances& tol = kDefaultTol) {
  const double sl = f.slope_left(), sr = f.slope_right();
  if (sl > sr + tol.eps) fail(ErrorCode::UnboundedHull, "left asymptotic slope exceeds right asymptotic slope");
  if (f.is_affine()) return f;

  const auto& ks = f.breakpoints();
  const auto& vs = f.values();
  auto slope = [&](std::size_t a, std::size_t b) { return (vs[b] - vs[a]) / (ks[b] - ks[a]); };
  auto same = [](double s1, double s2) { return s1 >= s2 - 1e-12 * (1.0 + std::abs(s1) + std::abs(s2)); };

  std::vector<std::size_t> chain;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    while (chain.size() >= 2 && same(slope(chain[chain.size() - 2], chain.back()), slope(chain.back(), i)))
      chain.pop_back();
    chain.push_back(i);
  }
  std::size_t first = 0, last = chain.size();
  while (last - first >= 2 && same(sl, slope(chain[first], chain[first + 1]))) ++first;
  while (last - first >= 2 && same(slope(chain[last - 2], chain[last - 1]), sr)) --last;

  std::vector<double> hk, hv;
  for (std::size_t c = first; c < last; ++c) {
    hk.push_back(ks[chain[c]]);
    hv.push_back(vs[chain[c]]);
  }
  return PwlFunction::from_points(std::move(hk), std::move(hv), sl, sr);
}

struct SupGap {
  double value = 0.0;
  double witness = 0.0;  // breakpoint or +/-inf
};

/// sup_k { f(k) - g(k) } over breakpoints and asymptotic limits.
inline SupGap sup_gap(const PwlFunction& f, const PwlFunction& g, const Tolerances& tol = kDefaultTol) {
  PwlFunction d = f - g;
  if (d.slope_right() > tol.eps || d.slope_left() < -tol.eps)
    fail(ErrorCode::Unbounded, "difference grows without bound");
  if (d.is_affine()) return {d.evaluate(0.0), kInf};
  const auto& ks = d.breakpoints();
  const auto& vs = d.values();
  std::size_t best = static_cast<std::size_t>(std::max_element(vs.begin(), vs.end()) - vs.begin());
  SupGap gap{vs[best], ks[best]};
  if (std::abs(d.slope_right()) <= tol.eps && vs.back() >= gap.value - tol.eps)
    gap.witness = kInf;
  else if (std::abs(d.slope_left()) <= tol.eps && vs.front() >= gap.value - tol.eps)
    gap.witness = -kInf;
  return gap;
}

/// f <= g + eps everywhere; exact for piecewise-linear data.
inline bool dominated(const PwlFunction& f, const PwlFunction& g, double eps = kDefaultTol.eps) {
  PwlFunction d = g - f;
  if (d.slope_left() > eps || d.slope_right() < -eps) return false;
  if (d.is_affine()) return std::abs(d.slope_left()) <= eps && d.evaluate(0.0) >= -eps;
  for (double v : d.values())
    if (v < -eps) return false;
  return true;
}

/// max_k |f(k) - g(k)| over merged breakpoints; +inf if the asymptotic slopes differ.
inline double sup_distance(const PwlFunction& f, const PwlFunction& g, double eps = kDefaultTol.eps) {
  PwlFunction d = f - g;
  if (std::abs(d.slope_left()) > eps || std::abs(d.slope_right()) > eps) return kInf;
  if (d.is_affine()) return std::abs(d.evaluate(0.0));
  double worst = 0.0;
  for (double v : d.values()) worst = std::max(worst, std::abs(v));
  return worst;
}

/// The measure eta with P_eta = f, read off from slope jumps.
///
/// Requires f in D(mass, mean): convex, non-decreasing, vanishing at -inf,
/// and asymptotic to mass * k - mean at +inf. Throws NotInD otherwise.
inline DiscreteMeasure second_derivative_measure(const PwlFunction& f, double expect_mass, double expect_mean,
                                                 const Tolerances& tol = kDefaultTol) {
  if (!f.is_convex(tol.eps)) fail(ErrorCode::NotInD, "function is not convex");
  if (std::abs(f.slope_left()) > tol.eps) fail(ErrorCode::NotInD, "left asymptotic slope is not zero");
  if (std::abs(f.slope_right() - expect_mass) > tol.eps)
    fail(ErrorCode::NotInD, "right asymptotic slope " + std::to_string(f.slope_right()) + " differs from mass " +
                                std::to_string(expect_mass));
  if (f.is_affine()) {
    if (std::abs(f.evaluate(0.0)) > tol.eps || std::abs(expect_mass) > tol.eps || std::abs(expect_mean) > tol.eps)
      fail(ErrorCode::NotInD, "affine function is not the zero potential");
    return {};
  }
  const auto& ks = f.breakpoints();
  const auto& vs = f.values();
  if (std::abs(vs.front()) > tol.eps) fail(ErrorCode::NotInD, "function does not vanish at -inf");
  double right_gap = vs.back() - (expect_mass * ks.back() - expect_mean);
  if (std::abs(right_gap) > tol.eps)
    fail(ErrorCode::NotInD, "right asymptote is off by " + std::to_string(right_gap));
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double jump = f.segment_slope(i + 1) - f.segment_slope(i);
    atoms.push_back({ks[i], jump});
  }
  return DiscreteMeasure::from_signed(std::move(atoms), ErrorCode::NotInD, tol);
}

/// CSV rows "k,value": the breakpoints plus one guard point beyond each end.
inline void write_csv(std::ostream& os, const PwlFunction& f) {
  auto old_precision = os.precision(17);
  os << "k,value\n";
  std::vector<double> ks = f.breakpoints();
  double lo = ks.empty() ? 0.0 : ks.front(), hi = ks.empty() ? 0.0 : ks.back();
  double guard = std::max(1.0, hi - lo);
  std::vector<double> rows;
  rows.push_back(lo - guard);
  rows.insert(rows.end(), ks.begin(), ks.end());
  rows.push_back(hi + guard);
  for (double k : rows) os << k + 0.0 << "," << f.evaluate(k) + 0.0 << "\n";
  os.precision(old_precision);
}

}  // namespace wot
