#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rr/contact/models.hpp"
#include "rr/curvature/curvature.hpp"
#include "rr/errors.hpp"

using namespace rr;
using namespace rr::contact;
using namespace rr::curvature;
using chart::ScalarField;
constexpr double kPi = std::numbers::pi;

namespace {

ModelParams small_grid() {
  ModelParams p;
  p.grid = {6, 6, 6};
  return p;
}

ContactData heisenberg() { return model_manifold("heisenberg_r3", small_grid()); }
ContactData torus() { return model_manifold("torus_xi_n", small_grid()); }

// Generic non-K-contact structure: mapping torus with a randomly perturbed section.
ContactData perturbed(std::uint64_t seed, double lam = 0.4, double eta = 0.3) {
  ModelParams p = small_grid();
  p.base_perturbation = {lam, eta, seed};
  return model_manifold("mapping_torus_box", p);
}

ContactData random_perturbation(const ContactData& base, std::uint64_t seed) {
  const auto lam = 0.5 * random_smooth_field(seed, base.domain);
  const auto eta = exp(0.3 * random_smooth_field(seed + 7, base.domain));
  return with_section_perturbation(base, lam, eta);
}

std::vector<Vec3d> probe_points(const ContactData& cd, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec3d> pts;
  for (int i = 0; i < n; ++i) {
    Vec3d p{};
    for (std::size_t a = 0; a < 3; ++a) {
      const auto& b = cd.domain.bounds()[a];
      std::uniform_real_distribution<double> u(b.lo + 0.1 * b.length(), b.hi - 0.1 * b.length());
      p[a] = u(rng);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(Christoffel, FlatTorusVanishes) {
  const auto cd = torus();
  const MetricField g = compatible_metric(cd);
  const Christoffel gamma = christoffel_oracle(g, {0.2, 0.5, 0.7});
  for (const auto& m : gamma) EXPECT_LE(max_abs(m), 1e-12);
}

TEST(Christoffel, SymmetricAndMetricCompatible) {
  const auto cd = perturbed(3);
  for (const auto& p : probe_points(cd, 5, 1)) {
    const JetMat g = contact_jets(cd, p, 1).g;
    const Christoffel gamma = christoffel_values(g);
    for (const auto& m : gamma) EXPECT_LE(max_abs(m - transpose(m)), 1e-14);
    EXPECT_LE(metric_compatibility_residual(g, gamma), 1e-12);
  }
}

TEST(Christoffel, ReebFlowlinesAreGeodesics) {
  for (const auto& cd : {heisenberg(), perturbed(4)}) {
    for (const auto& p : probe_points(cd, 5, 2)) {
      const auto cj = contact_jets(cd, p, 1);
      const Vec3d nxx = covariant_derivative(christoffel_values(cj.g), cj.reeb, values(cj.reeb));
      EXPECT_LE(norm(nxx), 1e-12);
    }
  }
}

TEST(Sectional, FlatTorusIsZero) {
  const auto cd = torus();
  const MetricField g = compatible_metric(cd);
  EXPECT_NEAR(sectional_oracle(g, {0.1, 0.2, 0.3}, {1, 0, 0}, {0, 1, 1}), 0.0, 1e-12);
}

TEST(Sectional, BasisChangeInvariance) {
  const auto cd = perturbed(5);
  const MetricField g = compatible_metric(cd);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const Vec3d p{u(rng) * 0.3, u(rng) * 0.3, 0.5 + 0.3 * u(rng)};
    const Vec3d a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const double k = sectional_oracle(g, p, a, b);
    const double m00 = u(rng) + 2.0, m01 = u(rng), m10 = u(rng), m11 = u(rng) + 2.0;
    const double k2 = sectional_oracle(g, p, scale(m00, a) + scale(m01, b), scale(m10, a) + scale(m11, b));
    EXPECT_NEAR(k, k2, 1e-8);
  }
}

TEST(Sectional, HeisenbergReebPlaneIsOne) {
  const auto cd = heisenberg();
  const MetricField g = compatible_metric(cd);
  const Vec3d p{0.3, -0.2, 0.1};
  const auto fp = frame_point(cd, p);
  EXPECT_NEAR(sectional_oracle(g, p, fp.e, fp.x), 1.0, 1e-12);
  EXPECT_NEAR(sectional_oracle(g, p, fp.je, fp.x), 1.0, 1e-12);
}

TEST(Sectional, DegeneratePlaneThrows) {
  const MetricField g = compatible_metric(torus());
  EXPECT_THROW(sectional_oracle(g, {0.1, 0.1, 0.1}, {1, 0, 0}, {2, 0, 0}), InvalidInput);
}

TEST(RicciOracle, ModelValues) {
  EXPECT_NEAR(ricci_reeb_oracle(torus(), {0.3, 0.4, 0.5}), 0.0, 1e-10);
  EXPECT_NEAR(ricci_reeb_oracle(heisenberg(), {0.3, 0.4, 0.5}), 2.0, 1e-12);
}

TEST(PQRicci, ModelValues) {
  const auto h = pq_ricci(heisenberg(), frame_point(heisenberg(), {0.1, 0.2, 0.3}));
  EXPECT_NEAR(h.P, 0.0, 1e-12);
  EXPECT_NEAR(h.Q, 0.0, 1e-12);
  EXPECT_NEAR(h.ricci, 2.0, 1e-12);
  const auto t = pq_ricci(torus(), frame_point(torus(), {0.1, 0.2, 0.3}));
  EXPECT_NEAR(t.P, 0.0, 1e-10);
  EXPECT_NEAR(t.Q, kPi, 1e-10);
  EXPECT_NEAR(t.ricci, 0.0, 1e-9);
}

TEST(PQRicci, MatchesLeviCivitaDefinition) {
  // P = g(e, nabla_e X) and Q = theta'/2 - g(Je, nabla_e X) fix the sign convention.
  const auto cd = perturbed(6);
  for (const auto& p : probe_points(cd, 6, 4)) {
    const auto fp = frame_point(cd, p, 0.3);
    const auto pq = pq_ricci(cd, fp);
    const auto cj = contact_jets(cd, p, 1);
    const Vec3d ne = covariant_derivative(christoffel_values(cj.g), cj.reeb, fp.e);
    const Mat3d g = values(cj.g);
    EXPECT_NEAR(pq.P, bilinear(g, fp.e, ne), 1e-10);
    EXPECT_NEAR(pq.Q, 0.5 * cd.theta_prime - bilinear(g, fp.je, ne), 1e-10);
  }
}

TEST(PQRicci, FrameRotationInvariance) {
  const auto cd = perturbed(7);
  const Vec3d p{0.1, -0.1, 0.4};
  const double r0 = pq_ricci(cd, frame_point(cd, p)).ricci;
  for (double a : {0.3, 1.1, 2.9}) EXPECT_NEAR(pq_ricci(cd, frame_point(cd, p, a)).ricci, r0, 1e-10);
}

TEST(PQRicci, ClosedFormMatchesOracleAndBound) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (const auto& base : {heisenberg(), torus(), perturbed(seed)}) {
      const auto cd = random_perturbation(base, seed + 20);
      for (const auto& p : probe_points(cd, 4, seed)) {
        const auto r = curvature_report(cd, p);
        EXPECT_LE(r.ricci_residual, 1e-6) << cd.name;
        EXPECT_LE(r.bound_excess, 1e-6) << cd.name;
      }
    }
  }
}

TEST(ReebDerivative, ModelValues) {
  const auto h = heisenberg();
  const auto fp = frame_point(h, {0.2, 0.3, 0.1});
  const auto d = covariant_reeb_derivative(h, fp.point, fp.e);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.closed[i], fp.je[i], 1e-12);
  EXPECT_LE(d.residual, 1e-12);

  const auto t = torus();
  const auto ft = frame_point(t, {0.2, 0.3, 0.1});
  const Vec3d e = values(contact_jets(t, ft.point, 0).e);
  EXPECT_LE(norm(covariant_reeb_derivative(t, ft.point, e).oracle), 1e-10);
}

TEST(ReebDerivative, ClosedFormMatchesOracleAndIsDivergenceFree) {
  const auto cd = perturbed(8);
  for (const auto& p : probe_points(cd, 6, 5)) {
    const auto fp = frame_point(cd, p, 0.9);
    const auto a = covariant_reeb_derivative(cd, p, fp.e);
    const auto b = covariant_reeb_derivative(cd, p, fp.je);
    EXPECT_LE(a.residual, 1e-10);
    EXPECT_LE(b.residual, 1e-10);
    EXPECT_NEAR(a.normal, 0.0, 1e-12);
    const Mat3d g = values(contact_jets(cd, p, 0).g);
    EXPECT_NEAR(bilinear(g, fp.e, a.oracle) + bilinear(g, fp.je, b.oracle), 0.0, 1e-10);
  }
}

TEST(ReebDerivative, RejectsVectorOutsideXi) {
  const auto h = heisenberg();
  EXPECT_THROW(covariant_reeb_derivative(h, {0, 0, 0}, {0, 0, 1}), InvalidInput);
}

TEST(SecondFundamental, ModelValues) {
  const auto h = second_fundamental(heisenberg(), {0.1, 0.2, 0.3});
  EXPECT_NEAR(h.H, 0.0, 1e-12);
  EXPECT_NEAR(h.G, 1.0, 1e-12);
  const auto t = second_fundamental(torus(), {0.1, 0.2, 0.3});
  EXPECT_NEAR(t.H, 0.0, 1e-12);
  EXPECT_NEAR(t.G, 0.0, 1e-10);
}

TEST(SecondFundamental, MeanCurvatureZeroAndRicciTwiceGauss) {
  const auto cd = random_perturbation(perturbed(9), 44);
  for (const auto& p : probe_points(cd, 6, 6)) {
    const auto r = curvature_report(cd, p);
    EXPECT_LE(std::fabs(r.H), 1e-8);
    EXPECT_LE(r.gauss_residual, 1e-6);
  }
}

TEST(Jacobi, TorusPushForwardIsLinear) {
  const auto cd = torus();
  const Vec3d p{0.3, 0.7, 0.15};
  const auto path = alpha_jacobi_propagate(cd, p, {0, 0, 1}, 1.0, 1000);
  const double z = p[2];
  const Vec3d e{std::sin(2 * kPi * z), std::cos(2 * kPi * z), 0.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    const Vec3d expect = Vec3d{0, 0, 1} - scale(2 * kPi * path.t[i], e);
    worst = std::fmax(worst, norm(path.v[i] - expect));
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_LE(path.area_drift(), 1e-6);
  EXPECT_NEAR(path.area.front(), 1.0, 1e-12);
}

TEST(Jacobi, HeisenbergLengthPreserved) {
  const auto cd = heisenberg();
  const auto fp = frame_point(cd, {0.1, 0.2, -0.5}, 0.4);
  const auto path = alpha_jacobi_propagate(cd, fp.point, fp.e, 0.9, 900);
  const Mat3d g0 = values(contact_jets(cd, fp.point, 0).g);
  const double len0 = std::sqrt(bilinear(g0, fp.e, fp.e));
  for (std::size_t i = 0; i < path.t.size(); i += 100) {
    const Mat3d g = values(contact_jets(cd, path.x[i], 0).g);
    EXPECT_NEAR(std::sqrt(bilinear(g, path.v[i], path.v[i])), len0, 1e-10);
  }
}

TEST(Jacobi, AreaConservedAndEquationHolds) {
  const auto cd = perturbed(10);
  const auto fp = frame_point(cd, {0.05, -0.05, 0.0}, 0.2);
  const auto path = alpha_jacobi_propagate(cd, fp.point, fp.e, 1.0, 1000);
  EXPECT_LE(path.area_drift(), 1e-6);
  EXPECT_LE(path.max_alpha_leak, 1e-8);
  EXPECT_LE(jacobi_equation_residual(cd, path, 100), 1e-3);
}

TEST(Jacobi, EquationHoldsOnCurvedPeriodicStructure) {
  const auto cd = random_perturbation(torus(), 3);
  const auto fp = frame_point(cd, {0.4, 0.1, 0.8}, 1.3);
  const auto path = alpha_jacobi_propagate(cd, fp.point, fp.je, 1.0, 1000);
  EXPECT_LE(path.area_drift(), 1e-6);
  EXPECT_LE(jacobi_equation_residual(cd, path, 100), 1e-3);
}

TEST(Jacobi, LeavingChartThrows) {
  const auto cd = heisenberg();
  const auto fp = frame_point(cd, {0.0, 0.0, 0.9});
  EXPECT_THROW(alpha_jacobi_propagate(cd, fp.point, fp.e, 1.0, 100), InvalidInput);
}

TEST(SectionalViaJacobi, MatchesOracle) {
  EXPECT_NEAR(sectional_via_jacobi(heisenberg(), {0.1, 0.2, 0.3}, frame_point(heisenberg(), {0.1, 0.2, 0.3}).e),
              1.0, 1e-6);
  const auto t = torus();
  for (double a : {0.0, 0.7}) {
    const auto fp = frame_point(t, {0.1, 0.2, 0.3}, a);
    EXPECT_NEAR(sectional_via_jacobi(t, fp.point, fp.e), 0.0, 1e-6);
  }
  const auto cd = perturbed(11);
  const MetricField g = compatible_metric(cd);
  for (const auto& p : probe_points(cd, 4, 7)) {
    const auto fp = frame_point(cd, p, 0.5);
    const double ke = sectional_via_jacobi(cd, p, fp.e);
    const double kj = sectional_via_jacobi(cd, p, fp.je);
    EXPECT_NEAR(ke, sectional_oracle(g, p, fp.e, fp.x), 1e-3);
    EXPECT_NEAR(kj, sectional_oracle(g, p, fp.je, fp.x), 1e-3);
    EXPECT_NEAR(ke + kj, ricci_reeb_oracle(cd, p), 1e-3);
  }
}

TEST(Equivalence, ModelsAllTrueAllFalse) {
  for (const auto& p : probe_points(heisenberg(), 5, 8)) {
    const auto e = max_ricci_equivalence(heisenberg(), p);
    EXPECT_TRUE(e.ricci_max && e.geodesible && e.lxj_zero && e.lxg_zero);
  }
  for (const auto& p : probe_points(torus(), 5, 8)) {
    const auto e = max_ricci_equivalence(torus(), p);
    EXPECT_FALSE(e.ricci_max || e.geodesible || e.lxj_zero || e.lxg_zero);
    EXPECT_EQ(e.zero_directions, 4);
  }
}

TEST(Equivalence, AgreesAndFindsFourZerosOnGenericStructure) {
  const auto cd = perturbed(12);
  for (const auto& p : probe_points(cd, 10, 9)) {
    const auto e = max_ricci_equivalence(cd, p);
    EXPECT_TRUE(e.agree());
    if (!e.ricci_max) EXPECT_EQ(e.zero_directions, 4);
    // The conversions between the four quantities are exact identities.
    const double A = e.sweep_max;
    EXPECT_NEAR(e.lxj_norm, e.lxg_norm, 1e-9);
    EXPECT_LE(2 * A * A, e.ricci_gap + 1e-9);
  }
}

TEST(Equivalence, CountCyclicZeros) {
  const double s1[8] = {1, 0.5, -0.5, -1, -0.5, 0.5, 1, 0.5};
  EXPECT_EQ(count_cyclic_zeros(s1, 8, 1e-12), 2);
  const double s2[4] = {1, 0, -1, 0};
  EXPECT_EQ(count_cyclic_zeros(s2, 4, 1e-12), 2);
}

TEST(FdBackend, ClosedFormAndOracleAgreeAtDiscretizationRung) {
  const auto cd = perturbed(13).with_backend(Backend::FiniteDifference);
  for (const auto& p : probe_points(cd, 3, 10)) {
    const auto r = curvature_report(cd, p);
    EXPECT_LE(r.ricci_residual, kDiscretizationTol);
  }
}

TEST(Sweep, GridSweepOnTorus) {
  const auto cd = torus();
  const auto s = sweep_curvature(cd, cd.domain.quadrature().points);
  EXPECT_EQ(s.skipped, 0u);
  EXPECT_TRUE(s.skipped_ok());
  EXPECT_LE(s.worst_ricci, 1e-6);
  EXPECT_LE(s.worst_H, 1e-8);
  for (const auto& r : s.reports) {
    EXPECT_NEAR(r.P, 0.0, 1e-8);
    EXPECT_NEAR(r.Q, kPi, 1e-8);
  }
}
