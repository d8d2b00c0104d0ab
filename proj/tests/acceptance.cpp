// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "support/instances.hpp"
#include "wot/wot.hpp"

using namespace wot;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tally {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && first_failure_.empty()) first_failure_ = what;
    ok_ = ok_ && ok;
  }
  void worst(const char* name, double v) { worst_[name] = std::max(worst_[name], v); }
  Outcome done(const std::string& extra = "") const {
    std::ostringstream s;
    s << checks_ << " checks";
    for (const auto& [k, v] : worst_) s << ", " << k << "=" << v;
    if (!extra.empty()) s << ", " << extra;
    if (!ok_) s << "; first failure: " << first_failure_;
    return {ok_, s.str()};
  }

 private:
  bool ok_ = true;
  std::size_t checks_ = 0;
  std::string first_failure_;
  std::map<std::string, double> worst_;
};

std::vector<gen::Instance> instances(std::uint64_t seed, std::size_t count, std::size_t max_atoms) {
  std::mt19937_64 rng(seed);
  std::vector<gen::Instance> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen::random_instance(rng, max_atoms));
  return out;
}

const std::vector<gen::Instance>& main_instances() {
  static const auto all = instances(20261014, 200, 8);
  return all;
}

Outcome value_agreement() {
  Tally t;
  auto start = std::chrono::steady_clock::now();
  for (const auto& in : main_instances()) {
    double gap = std::abs(wot_value(in.mu, in.nu) - wot_value_lp(in.mu, in.nu).value);
    t.worst("max_gap", gap);
    t.require(gap <= 1e-7, in.mu.to_string() + " / " + in.nu.to_string());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.require(secs < 10.0, "runtime");
  return t.done("runtime=" + std::to_string(secs) + "s");
}

Outcome put_call_constants() {
  Tally t;
  for (const auto& in : main_instances()) {
    Constants k = compute_constants(in.mu, in.nu);
    double gap = std::abs(k.p - (k.c + in.nu.mean() - in.mu.mean()));
    t.worst("max_gap", gap);
    t.require(gap <= 1e-12, in.mu.to_string() + " / " + in.nu.to_string());
  }
  return t.done();
}

Outcome decomposition_soundness() {
  Tally t;
  for (const auto& in : main_instances()) {
    Decomposition d = decompose(in.mu, in.nu);
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    t.require(check_order(d.eta_minus, d.chi_minus, OrderRelation::ConvexIncreasing), "ci " + tag);
    t.require(check_order(d.eta_zero, d.chi_zero, OrderRelation::Convex), "c " + tag);
    t.require(check_order(d.eta_plus, d.chi_plus, OrderRelation::ConvexDecreasing), "cd " + tag);
    t.require(approx_equal(d.eta_minus + d.eta_zero + d.eta_plus, in.mu, 1e-15), "eta sum " + tag);
    t.require(approx_equal(d.chi_minus + d.chi_zero + d.chi_plus, in.nu, 1e-15), "chi sum " + tag);
    double imbalance = std::max({std::abs(d.eta_minus.mass() - d.chi_minus.mass()),
                                 std::abs(d.eta_zero.mass() - d.chi_zero.mass()),
                                 std::abs(d.eta_plus.mass() - d.chi_plus.mass())});
    t.worst("max_mass_imbalance", imbalance);
    t.require(imbalance <= 1e-15, "mass balance " + tag);
    t.worst("min_chi_atom_neg", std::max(0.0, -std::min(d.chi_minus_atom, d.chi_plus_atom)));
    t.require(d.chi_plus_atom >= -1e-12 && d.chi_minus_atom >= -1e-12, "chi atom " + tag);
  }
  return t.done();
}

Outcome optimizer_characterization() {
  Tally t;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lam(0.5, 0.95);
  double min_margin = kInf;
  std::size_t non_members = 0;
  for (const auto& in : main_instances()) {
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    Coupling star = extremal_covariance(in.mu, in.nu, Sense::Min);
    double lp = wot_value_lp(in.mu, in.nu).value, v = wot_value(in.mu, in.nu);
    t.require(is_pistar_member(star, in.mu, in.nu), "member " + tag);
    t.worst("assembled_vs_lp", std::abs(barycentric_cost(star) - lp));
    t.require(std::abs(barycentric_cost(star) - lp) <= 1e-7, "cost " + tag);
    for (int k = 0; k < 50; ++k) {
      Coupling pi = sample_coupling(in.mu, in.nu, rng);
      if (k >= 40) pi = mix(star, pi, lam(rng));
      if (pistar_violation(pi, in.mu, in.nu) <= 1e-6) continue;
      ++non_members;
      double margin = barycentric_cost(pi) - v;
      min_margin = std::min(min_margin, margin);
      t.require(margin > 0.0, "non-member margin " + tag);
    }
  }
  std::ostringstream s;
  s << "non_members=" << non_members << ", min_margin=" << min_margin;
  return t.done(s.str());
}

Outcome shadow_minimality() {
  Tally t;
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    DiscreteMeasure mu = gen::random_measure(rng, 6, 0.5), nu = gen::random_measure(rng, 8, 1.0);
    std::string tag = mu.to_string() + " / " + nu.to_string();
    DiscreteMeasure s = shadow(mu, nu);
    t.require(check_order(s, nu, OrderRelation::Setwise) && std::abs(s.mass() - mu.mass()) <= 1e-12, "feasible " + tag);
    Constants k{std::max(0.0, sup_gap(put_potential(mu), put_potential(nu)).value),
                std::max(0.0, sup_gap(call_potential(mu), call_potential(nu)).value)};
    t.worst("mean_identity", std::abs(s.mean() - (mu.mean() + k.p - k.c)));
    t.require(std::abs(s.mean() - (mu.mean() + k.p - k.c)) <= 1e-9, "mean " + tag);
    MinTargetResult lp = min_target_lp(mu, nu);
    double vs = wot_value(mu, s);
    t.worst("min_target_gap", std::abs(vs - lp.value));
    t.require(std::abs(vs - lp.value) <= 1e-7, "min target " + tag);
    Constants ks = target_stats(s, mu), kt = target_stats(lp.theta, mu);
    PwlFunction lhs = put_potential(s).add_constant(ks.p), rhs = put_potential(lp.theta).add_constant(kt.p);
    std::vector<double> ks_all;
    for (const auto* m : {&mu, &nu, &s, &lp.theta})
      for (const Atom& a : m->atoms()) ks_all.push_back(a.x);
    double over = 0.0;
    for (double x : ks_all) over = std::max(over, lhs(x) - rhs(x));
    t.worst("potential_excess", over);
    t.require(over <= 1e-9, "potential chain " + tag);
  }
  return t.done();
}

Outcome associativity() {
  Tally t;
  DiscreteMeasure half = DiscreteMeasure::point(0, 0.5), tent = make_measure({{-1, 0.5}, {2, 1.0}});
  DiscreteMeasure s1 = shadow(half, tent);
  DiscreteMeasure s2 = shadow(half, subtract(tent, s1));
  t.require(approx_equal(s1, make_measure({{-1, 1.0 / 3}, {2, 1.0 / 6}}), 1e-15), "hand example first shadow");
  t.require(approx_equal(s1 + s2, shadow(DiscreteMeasure::point(0), tent), 1e-15), "hand example sum");
  t.require(shadow_residual_check(half, half, tent), "hand example check");
  std::mt19937_64 rng(6);
  for (int it = 0; it < 200; ++it) {
    DiscreteMeasure mu1 = gen::random_measure(rng, 4, 0.375), mu2 = gen::random_measure(rng, 4, 0.375);
    DiscreteMeasure nu = gen::random_measure(rng, 8, 1.0);
    AssociativityReport r = shadow_associativity(mu1, mu2, nu);
    t.worst("max_discrepancy", r.discrepancy);
    t.require(shadow_residual_check(mu1, mu2, nu) && r.discrepancy <= 1e-9, mu1.to_string() + " + " + mu2.to_string());
  }
  return t.done();
}

Outcome shadow_couplings() {
  Tally t;
  for (std::size_t n = 0; n < 100; ++n) {
    const auto& in = main_instances()[n];
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    for (LiftKind kind : {LiftKind::Ascending, LiftKind::Descending}) {
      Lift lift = make_lift(in.mu, kind);
      LiftedCoupling lc = shadow_coupling(lift, in.nu);
      t.worst("marginal_error", lc.flattened.marginal_error());
      t.require(lc.flattened.marginal_error() <= 1e-12, "marginals " + tag);
      double pre = prefix_shadow_discrepancy(lift, lc, in.nu);
      t.worst("prefix_discrepancy", pre);
      t.require(pre <= 1e-9, "prefix " + tag);
      t.require(is_pistar_member(lc.flattened, in.mu, in.nu), "member " + tag);
      for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        t.worst("region_gap", region_decomposition_gap(lift, in.nu, u));
        t.require(region_decomposition_check(lift, in.nu, u), "region " + tag);
      }
    }
  }
  return t.done();
}

Outcome covariance_extremes() {
  Tally t;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), weight(0.0, 1.0);
  for (std::size_t n = 0; n < 100; ++n) {
    const auto& in = main_instances()[n];
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    CostMatrix xy = cost_matrix(in.mu, in.nu, [](double x, double y) { return x * y; });
    double lo = covariance_integral(extremal_covariance(in.mu, in.nu, Sense::Min));
    double hi = covariance_integral(extremal_covariance(in.mu, in.nu, Sense::Max));
    double lp_lo = constrained_ot_lp(in.mu, in.nu, xy, Sense::Min).value;
    double lp_hi = constrained_ot_lp(in.mu, in.nu, xy, Sense::Max).value;
    t.worst("extreme_gap", std::max(std::abs(lo - lp_lo), std::abs(hi - lp_hi)));
    t.require(std::abs(lo - lp_lo) <= 1e-7 && std::abs(hi - lp_hi) <= 1e-7, "extremes " + tag);
    // Members: random convex combinations of randomly reached vertices.
    std::vector<Coupling> vertices;
    for (int v = 0; v < 8; ++v) {
      CostMatrix c(in.mu.size(), std::vector<double>(in.nu.size()));
      for (auto& row : c)
        for (double& x : row) x = unit(rng);
      vertices.push_back(constrained_ot_lp(in.mu, in.nu, c, Sense::Min).coupling);
    }
    for (int k = 0; k < 50; ++k) {
      Coupling pi = vertices[0];
      double total = weight(rng) + 1e-3;
      for (std::size_t v = 1; v < vertices.size(); ++v) {
        double w = weight(rng);
        pi = mix(pi, vertices[v], total / (total + w));
        total += w;
      }
      double cov = covariance_integral(pi);
      t.require(is_pistar_member(pi, in.mu, in.nu), "member " + tag);
      t.require(cov >= lo - 1e-7 && cov <= hi + 1e-7, "sandwich " + tag);
    }
  }
  return t.done();
}

Outcome projection_map() {
  Tally t;
  const Tolerances grid{1e-12, 1e-12, 1e-6, 1e-6};
  for (const auto& in : instances(9, 100, 6)) {
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    Decomposition d = decompose(in.mu, in.nu);
    MonotoneMap map = optimal_map(in.mu, in.nu);
    t.require(map.is_monotone() && map.is_lipschitz(), "admissible " + tag);
    DisplacementReport rep = displacement_profile(map, d.x_minus, d.x_plus);
    t.require(rep.non_increasing && rep.sign_pattern, "displacement " + tag);
    DiscreteMeasure image = map.push_forward(in.mu);
    t.require(check_order(image, in.nu, OrderRelation::Convex, grid), "image order " + tag);
    double cost = 0.0;
    for (const Atom& a : in.mu.atoms()) cost += std::abs(a.x - map(a.x)) * a.w;
    double v = wot_value(in.mu, in.nu);
    t.worst("cost_gap", std::abs(cost - v));
    t.require(std::abs(cost - v) <= 1e-6, "cost " + tag);
    GridProjection gp = grid_projection(in.mu, in.nu, 64, 1);
    t.worst("grid_excess", gp.objective - v);
    t.require(gp.objective >= v - 1e-6, "grid cross-check " + tag);
  }
  return t.done();
}

Outcome degenerate_orders() {
  Tally t;
  std::mt19937_64 rng(10);
  for (int it = 0; it < 50; ++it) {
    double drift = (it % 2 ? 1.0 : -1.0) * (1 + it % 3) / 4.0;
    gen::Instance in = gen::ordered_instance(rng, 5, drift);
    std::string tag = in.mu.to_string() + " / " + in.nu.to_string();
    bool sub = drift > 0;
    t.require(check_order(in.mu, in.nu, sub ? OrderRelation::ConvexIncreasing : OrderRelation::ConvexDecreasing),
              "order " + tag);
    double gap = std::abs(in.nu.mean() - in.mu.mean()), v = wot_value(in.mu, in.nu);
    t.require(v == gap, "shortcut value " + tag);
    std::vector<Coupling> family;
    for (Flavor f : {Flavor::Increasing, Flavor::Decreasing})
      family.push_back(sub ? submartingale_coupling(in.mu, in.nu, f) : supermartingale_coupling(in.mu, in.nu, f));
    for (int k = 0; k < 10; ++k)
      family.push_back(
          sample_barycenter_coupling(in.mu, in.nu, sub ? BarycenterRule::AtLeast : BarycenterRule::AtMost, rng));
    for (const Coupling& pi : family) {
      t.worst("cost_gap", std::abs(barycentric_cost(pi) - v));
      t.require(std::abs(barycentric_cost(pi) - v) <= 1e-9, "coupling cost " + tag);
    }
  }
  return t.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"wot value agreement", value_agreement},
      {"put-call constants", put_call_constants},
      {"decomposition soundness", decomposition_soundness},
      {"optimizer characterization", optimizer_characterization},
      {"shadow feasibility and minimality", shadow_minimality},
      {"shadow associativity", associativity},
      {"shadow couplings", shadow_couplings},
      {"covariance extremes", covariance_extremes},
      {"projection map", projection_map},
      {"degenerate orders", degenerate_orders},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
