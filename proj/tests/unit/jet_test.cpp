#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rr/jet.hpp"
#include "rr/tensor.hpp"

using rr::Jet;
using namespace rr;

namespace {

// Taylor coefficients of sin(x) * exp(y) * (1 + z)^2 about (x0, y0, z0), by the product rule on
// independent univariate series.
double oracle_coeff(int a, int b, int c, double x0, double y0, double z0) {
  auto fact = [](int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  const double sa[4] = {std::sin(x0), std::cos(x0), -std::sin(x0), -std::cos(x0)};
  const double dx = sa[a % 4] / fact(a);
  const double dy = std::exp(y0) / fact(b);
  double dz = 0;
  if (c == 0) dz = (1 + z0) * (1 + z0);
  if (c == 1) dz = 2 * (1 + z0);
  if (c == 2) dz = 1;
  return dx * dy * dz;
}

}  // namespace

TEST(Jet, LayoutIsGraded) {
  EXPECT_EQ(rr::jet_size(0), 1);
  EXPECT_EQ(rr::jet_size(2), 10);
  EXPECT_EQ(rr::jet_size(4), 35);
  EXPECT_EQ(Jet::monomial_index(0, 0, 0), 0);
  EXPECT_EQ(Jet::monomial_index(1, 0, 0), 1);
  EXPECT_EQ(Jet::monomial_index(0, 0, 1), 3);
  for (int m = 0; m < rr::kJetCapacity; ++m) {
    const auto e = Jet::monomial(m);
    EXPECT_EQ(Jet::monomial_index(e[0], e[1], e[2]), m);
  }
}

TEST(Jet, ProductOfSeriesMatchesOracle) {
  const double x0 = 0.3, y0 = -0.7, z0 = 0.25;
  const auto p = rr::seed_point({x0, y0, z0}, 4);
  const Jet one_plus_z = 1.0 + p[2];
  const Jet f = rr::sin(p[0]) * rr::exp(p[1]) * (one_plus_z * one_plus_z);
  for (int m = 0; m < rr::jet_size(4); ++m) {
    const auto e = Jet::monomial(m);
    EXPECT_NEAR(f.coeff(m), oracle_coeff(e[0], e[1], e[2], x0, y0, z0), 1e-13) << m;
  }
}

TEST(Jet, ExactConstantsAdoptOrder) {
  const Jet x = Jet::variable(0, 2.0, 3);
  const Jet r = 5.0 * x + Jet(1.0);
  EXPECT_FALSE(r.exact());
  EXPECT_EQ(r.order(), 3);
  EXPECT_DOUBLE_EQ(r.value(), 11.0);
  EXPECT_DOUBLE_EQ(r.d(0), 5.0);
  EXPECT_TRUE((Jet(2.0) * Jet(3.0)).exact());
}

TEST(Jet, MixedOrdersTruncateToMinimum) {
  const Jet a = Jet::variable(0, 1.0, 4);
  const Jet b = Jet::variable(1, 1.0, 2);
  EXPECT_EQ((a * b).order(), 2);
  EXPECT_EQ((a + b).order(), 2);
}

TEST(Jet, PartialLowersOrder) {
  const auto p = rr::seed_point({0.1, 0.2, 0.3}, 3);
  const Jet f = p[0] * p[0] * p[1] + rr::cos(p[2]);
  const Jet fx = f.partial(0);
  EXPECT_EQ(fx.order(), 2);
  EXPECT_NEAR(fx.value(), 2 * 0.1 * 0.2, 1e-15);
  EXPECT_NEAR(fx.d(1), 2 * 0.1, 1e-15);
  EXPECT_NEAR(f.d2(2, 2), -std::cos(0.3), 1e-14);
  EXPECT_NEAR(f.d2(0, 1), 2 * 0.1, 1e-14);
}

TEST(Jet, QuotientAndPowersRoundTrip) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = rr::seed_point({u(rng), u(rng), u(rng)}, 4);
    const Jet f = p[0] * p[1] + p[2];
    const Jet q = (f / f);
    EXPECT_NEAR(q.value(), 1.0, 1e-14);
    for (int m = 1; m < 35; ++m) EXPECT_NEAR(q.coeff(m), 0.0, 1e-12);
    const Jet s = rr::sqrt(f);
    const Jet back = s * s - f;
    for (int m = 0; m < 35; ++m) EXPECT_NEAR(back.coeff(m), 0.0, 1e-12);
    const Jet l = rr::log(rr::exp(f)) - f;
    for (int m = 0; m < 35; ++m) EXPECT_NEAR(l.coeff(m), 0.0, 1e-11);
  }
}

TEST(Jet, ComposeMatchesDirectEvaluation) {
  // f expanded about q = (0.4, 0.1, -0.2); substitute x -> point jets about p that land on q.
  const rr::Vec3d q{0.4, 0.1, -0.2};
  const auto qs = rr::seed_point(q, 3);
  const Jet f = rr::sin(qs[0] * qs[1]) + qs[2] * qs[2] * qs[0];

  const auto ps = rr::seed_point({1.0, 2.0, 3.0}, 3);
  // Displacements: x = q0 + 0.5 dx + dy^2, y = q1 + dz, z = q2 - dx
  const rr::JetVec point{q[0] + 0.5 * (ps[0] - 1.0) + (ps[1] - 2.0) * (ps[1] - 2.0), q[1] + (ps[2] - 3.0),
                         q[2] - (ps[0] - 1.0)};
  const Jet composed = rr::compose(f, point);
  const Jet direct = rr::sin(point[0] * point[1]) + point[2] * point[2] * point[0];
  for (int m = 0; m < rr::jet_size(3); ++m) EXPECT_NEAR(composed.coeff(m), direct.coeff(m), 1e-13) << m;
}

TEST(Jet, TrigIdentity) {
  const auto p = rr::seed_point({0.7, -1.1, 2.0}, 4);
  const Jet a = p[0] * p[1] - p[2];
  const Jet one = rr::sin(a) * rr::sin(a) + rr::cos(a) * rr::cos(a);
  EXPECT_NEAR(one.value(), 1.0, 1e-14);
  for (int m = 1; m < 35; ++m) EXPECT_NEAR(one.coeff(m), 0.0, 1e-12);
}

TEST(Tensor, InverseAndEigenvalues) {
  const rr::Mat3d m{{{4, 1, 0.5}, {1, 3, 0.2}, {0.5, 0.2, 2}}};
  const rr::Mat3d id = rr::matmul(m, rr::inverse(m));
  EXPECT_LT(rr::max_abs(id - rr::identity3()), 1e-14);
  const auto ev = rr::symmetric_eigenvalues(m);
  EXPECT_NEAR(ev[0] + ev[1] + ev[2], rr::trace(m), 1e-13);
  EXPECT_NEAR(ev[0] * ev[1] * ev[2], rr::det(m), 1e-12);
  EXPECT_TRUE(rr::is_positive_definite(m));
  EXPECT_FALSE(rr::is_positive_definite(rr::Mat3d{{{1, 0, 0}, {0, -1, 0}, {0, 0, 1}}}));
}
