#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support/instances.hpp"
#include "wot/pwl.hpp"

using namespace wot;

namespace {

/// Convex envelope on a dense grid: min over chords through grid pairs
/// straddling each query point and over the asymptotic rays leaving a grid
/// point with the outer slopes of f.
double grid_envelope(const PwlFunction& f, double k, double lo = -50.0, double hi = 50.0, int n = 801) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  for (double b : f.breakpoints()) g.push_back(b);
  std::sort(g.begin(), g.end());
  double best = f(k);
  for (double a : g) best = std::min(best, a >= k ? f(a) - f.slope_left() * (a - k) : f(a) + f.slope_right() * (k - a));
  for (double a : g) {
    if (a > k) break;
    for (double b : g) {
      if (b < k || b <= a) continue;
      double t = (k - a) / (b - a);
      best = std::min(best, (1 - t) * f(a) + t * f(b));
    }
  }
  return best;
}

}  // namespace

TEST(Potentials, Examples) {
  EXPECT_DOUBLE_EQ(put_potential(DiscreteMeasure::point(0))(1.0), 1.0);
  EXPECT_DOUBLE_EQ(put_potential(make_measure({{-1, 0.5}, {2, 1.0}}))(0.0), 0.5);
  EXPECT_DOUBLE_EQ(call_potential(DiscreteMeasure::point(1))(0.0), 1.0);
  EXPECT_DOUBLE_EQ(put_potential(make_measure({{-2, 0.5}, {2, 0.5}}))(0.0), 1.0);
}

TEST(Potentials, ShapeAndUPotential) {
  auto m = make_measure({{-1, 0.5}, {2, 1.0}});
  auto p = put_potential(m);
  EXPECT_EQ(p.slope_left(), 0.0);
  EXPECT_EQ(p.slope_right(), 1.5);
  auto c = call_potential(m);
  EXPECT_EQ(c.slope_left(), -1.5);
  EXPECT_EQ(c.slope_right(), 0.0);
  auto u = u_potential(m);
  for (double k : {-3.0, -1.0, 0.0, 0.5, 2.0, 7.0}) EXPECT_DOUBLE_EQ(u(k), 0.5 * std::abs(k + 1) + std::abs(k - 2));
  EXPECT_EQ(put_potential(DiscreteMeasure{})(3.0), 0.0);
}

TEST(Arithmetic, SubtractAndAddConstant) {
  auto f = put_potential(make_measure({{-1, 0.5}, {2, 1.0}}));
  auto z = subtract(f, f);
  for (double k : {-5.0, -1.0, 0.0, 2.0, 9.0}) EXPECT_EQ(z(k), 0.0);
  auto g = add_constant(f, 0.75);
  for (double k : {-5.0, -1.0, 0.0, 2.0, 9.0}) EXPECT_DOUBLE_EQ(evaluate(g, k), f(k) + 0.75);
  auto h = add_constant(g, -0.75);
  for (double k : {-5.0, -1.0, 0.0, 2.0, 9.0}) EXPECT_DOUBLE_EQ(h(k), f(k));
  auto a = PwlFunction::affine(2.0, 1.0);
  EXPECT_DOUBLE_EQ((a + f)(2.0), 5.0 + f(2.0));
}

TEST(Derivatives, OneSided) {
  auto f = put_potential(make_measure({{-1, 0.5}, {2, 1.0}}));
  EXPECT_EQ(f.left_derivative(-1.0), 0.0);
  EXPECT_EQ(f.right_derivative(-1.0), 0.5);
  EXPECT_EQ(f.left_derivative(2.0), 0.5);
  EXPECT_EQ(f.right_derivative(2.0), 1.5);
  EXPECT_EQ(f.right_derivative(0.0), 0.5);
}

TEST(ConvexHull, IdempotentOnConvex) {
  auto f = put_potential(make_measure({{-1, 0.5}, {2, 1.0}}));
  auto h = convex_hull(f);
  EXPECT_LE(sup_distance(f, h), 1e-15);
}

TEST(ConvexHull, TentExample) {
  auto nu = make_measure({{-1, 0.5}, {2, 1.0}});
  auto f = put_potential(nu) - put_potential(DiscreteMeasure::point(0));
  auto h = convex_hull(f);
  for (double k : {-10.0, -1.0, 0.0, 1.0, 2.0}) EXPECT_NEAR(h(k), -0.5, 1e-15);
  for (double k : {2.0, 3.0, 10.0}) EXPECT_NEAR(h(k), 0.5 * k - 1.5, 1e-15);
  for (double k : {-3.0, -1.0, -0.5, 0.0, 1.0, 2.0, 4.0}) EXPECT_NEAR(h(k), grid_envelope(f, k), 1e-12);
}

TEST(ConvexHull, HalfMassExample) {
  auto nu = make_measure({{-1, 0.5}, {2, 1.0}});
  auto f = put_potential(nu) - put_potential(DiscreteMeasure::point(0, 0.5));
  auto h = convex_hull(f);
  for (double k : {-10.0, -1.0}) EXPECT_NEAR(h(k), 0.0, 1e-15);
  for (double k : {-1.0, 0.0, 0.5, 2.0}) EXPECT_NEAR(h(k), (k + 1) / 6, 1e-15);
  for (double k : {2.0, 5.0}) EXPECT_NEAR(h(k), k - 1.5, 1e-15);
  for (double k : {-3.0, -1.0, 0.0, 1.0, 2.0, 4.0}) EXPECT_NEAR(h(k), grid_envelope(f, k), 1e-12);
}

TEST(ConvexHull, UnboundedHull) {
  auto f = PwlFunction::from_points({0.0}, {0.0}, 1.0, -1.0);
  try {
    convex_hull(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedHull);
  }
}

TEST(ConvexHull, RandomDifferencesAgainstGridEnvelope) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 60; ++it) {
    auto mu = gen::random_measure(rng, 5, 0.5), nu = gen::random_measure(rng, 5, 1.0);
    auto f = put_potential(nu) - put_potential(mu);
    auto h = convex_hull(f);
    EXPECT_TRUE(h.is_convex(1e-12));
    auto hh = convex_hull(h);
    EXPECT_LE(sup_distance(h, hh), 1e-12);
    std::vector<double> ks = f.breakpoints();
    for (double k : ks) {
      EXPECT_LE(h(k), f(k) + 1e-12);
      EXPECT_NEAR(h(k), grid_envelope(f, k), 1e-9);
    }
  }
}

TEST(ConvexHull, DominatesRandomConvexMinorants) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    auto mu = gen::random_measure(rng, 5, 0.5), nu = gen::random_measure(rng, 5, 1.0);
    auto f = put_potential(nu) - put_potential(mu);
    auto h = convex_hull(f);
    // Max of two supporting lines of h, shifted below f.
    const auto& ks = f.breakpoints();
    double a = ks[static_cast<std::size_t>(u(rng) * ks.size()) % ks.size()];
    double b = ks[static_cast<std::size_t>(u(rng) * ks.size()) % ks.size()];
    auto line = [&](double at) { return PwlFunction::affine(h.right_derivative(at), h(at) - h.right_derivative(at) * at); };
    auto la = line(a), lb = line(b);
    for (double k : ks) {
      double g = std::max(la(k), lb(k)) - 0.01 * u(rng);
      if (g <= f(k) + 1e-12) {
        EXPECT_LE(g, h(k) + 1e-12);
      }
    }
  }
}

TEST(SupGap, Examples) {
  auto g1 = sup_gap(put_potential(DiscreteMeasure::point(0)), put_potential(DiscreteMeasure::point(1)));
  EXPECT_DOUBLE_EQ(g1.value, 1.0);
  EXPECT_EQ(g1.witness, kInf);
  auto m = make_measure({{-2, 0.5}, {2, 0.5}});
  EXPECT_DOUBLE_EQ(sup_gap(put_potential(m), put_potential(m)).value, 0.0);
  auto g3 = sup_gap(put_potential(m), put_potential(DiscreteMeasure::point(0)));
  EXPECT_DOUBLE_EQ(g3.value, 1.0);
  EXPECT_EQ(g3.witness, 0.0);
}

TEST(SupGap, Unbounded) {
  try {
    sup_gap(put_potential(DiscreteMeasure::point(0, 2.0)), put_potential(DiscreteMeasure::point(0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unbounded);
  }
}

TEST(SecondDerivative, Examples) {
  auto d = second_derivative_measure(put_potential(DiscreteMeasure::point(0)), 1.0, 0.0);
  EXPECT_TRUE(approx_equal(d, DiscreteMeasure::point(0), 1e-15));
  auto f = PwlFunction::from_points({-1.0, 2.0}, {0.0, 1.5}, 0.0, 1.0);
  auto m = second_derivative_measure(f, 1.0, 0.5);
  EXPECT_TRUE(approx_equal(m, make_measure({{-1, 0.5}, {2, 0.5}}), 1e-15));
  EXPECT_TRUE(second_derivative_measure(PwlFunction::affine(0.0, 0.0), 0.0, 0.0).empty());
}

TEST(SecondDerivative, NotInD) {
  auto expect_not_in_d = [](const PwlFunction& f, double mass, double mean) {
    try {
      second_derivative_measure(f, mass, mean);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotInD);
    }
  };
  expect_not_in_d(PwlFunction::from_points({0.0, 1.0}, {0.0, 1.0}, 0.0, 0.5), 0.5, 0.0);  // concave kink
  expect_not_in_d(put_potential(DiscreteMeasure::point(0)), 2.0, 0.0);                       // wrong mass
  expect_not_in_d(put_potential(DiscreteMeasure::point(0)), 1.0, 1.0);                       // wrong mean
  expect_not_in_d(put_potential(DiscreteMeasure::point(0)).add_constant(0.1), 1.0, -0.1);     // not vanishing
  expect_not_in_d(PwlFunction::affine(0.0, 1.0), 0.0, 0.0);
}

TEST(SecondDerivative, RoundTripRandom) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 500; ++it) {
    auto m = gen::random_measure(rng, 8);
    auto back = second_derivative_measure(put_potential(m), m.mass(), m.mean());
    EXPECT_TRUE(approx_equal(back, m, 1e-12));
  }
}

TEST(Csv, HeaderAndGuards) {
  std::ostringstream os;
  write_csv(os, put_potential(make_measure({{-1, 0.5}, {2, 1.0}})));
  EXPECT_EQ(os.str(), "k,value\n-4,0\n-1,0\n2,1.5\n5,6\n");
}
