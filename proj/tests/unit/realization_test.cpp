#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rr/contact/models.hpp"
#include "rr/curvature/curvature.hpp"
#include "rr/errors.hpp"
#include "rr/realization/realization.hpp"

using namespace rr;
using namespace rr::contact;
using namespace rr::realization;
using chart::ScalarField;
constexpr double kPi = std::numbers::pi;

namespace {

ModelParams small_grid() {
  ModelParams p;
  p.grid = {6, 6, 6};
  return p;
}

ContactData model(const std::string& name) { return model_manifold(name, small_grid()); }

ContactData perturbed_torus(std::uint64_t seed) {
  ModelParams p = small_grid();
  p.base_perturbation = {0.4, 0.3, seed};
  return model_manifold("mapping_torus_box", p);
}

const ScalarField kZ = ScalarField::coordinate(2);

// 2 - 2 sin^2(2 pi z): touches the ceiling at z = 0, 1/2, 1.
ScalarField sin_squared_target() { return 2.0 - 2.0 * sin(2.0 * kPi * kZ) * sin(2.0 * kPi * kZ); }

FlowBox unit_box(int seeds, int samples) {
  FlowBox b;
  b.x = {-0.4, 0.4};
  b.y = {-0.4, 0.4};
  b.z0 = 0.0;
  b.T = 1.0;
  b.seeds = {seeds, seeds};
  b.time_samples = samples;
  return b;
}

}  // namespace

TEST(Perturbation, IdentityLeavesMetric) {
  const auto cd = perturbed_torus(1);
  const auto r = perturb_complex_structure(cd, {});
  for (const Vec3d& p : {Vec3d{0.1, -0.2, 0.3}, Vec3d{-0.3, 0.4, 0.8}}) {
    EXPECT_LE(max_abs(values(contact_jets(r, p, 0).g) - values(contact_jets(cd, p, 0).g)), 1e-13);
  }
}

TEST(Perturbation, EtaScalesSectionLength) {
  const auto cd = model("mapping_torus_box");
  const auto r = perturb_complex_structure(cd, {ScalarField(0.0), ScalarField(2.0)});
  const Vec3d p{0.1, 0.2, 0.3};
  const Mat3d g = values(contact_jets(r, p, 0).g);
  const Vec3d e = chart::evaluate(cd.e, p);
  EXPECT_NEAR(std::sqrt(dot(e, matvec(g, e))), 2.0, 1e-12);
}

TEST(Perturbation, RejectsNonPositiveEta) {
  const auto cd = model("mapping_torus_box");
  EXPECT_THROW(perturb_complex_structure(cd, {ScalarField(0.0), ScalarField(0.0)}), InvalidInput);
  EXPECT_THROW(perturb_complex_structure(cd, {ScalarField(0.0), ScalarField::coordinate(0)}), InvalidInput);
}

TEST(Perturbation, ClosedFormMatchesOracle) {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  int cases = 0;
  for (const std::string name : {"heisenberg_r3", "torus_xi_n", "mapping_torus_box", "perturbed"}) {
    const ContactData base = name == "perturbed" ? perturbed_torus(5) : model(name);
    for (int s = 0; s < 5; ++s) {
      const PerturbationField pf{0.6 * random_smooth_field(100 + 2 * s, base.domain),
                                 exp(0.4 * random_smooth_field(101 + 2 * s, base.domain))};
      const ContactData r = contact::with_section_perturbation(base, pf.lambda, pf.eta);
      for (int k = 0; k < 5; ++k) {
        Vec3d p{};
        for (std::size_t a = 0; a < 3; ++a) {
          const auto& b = base.domain.bounds()[a];
          p[a] = std::uniform_real_distribution<double>(b.lo + 0.1 * b.length(), b.hi - 0.1 * b.length())(rng);
        }
        const double closed = ricci_perturbed_closed_form(base, pf, p).ricci;
        const double oracle = curvature::ricci_reeb_oracle(r, p);
        worst = std::fmax(worst, std::fabs(closed - oracle) / std::fmax(1.0, std::fabs(oracle)));
        EXPECT_LE(closed, 0.5 * base.theta_prime * base.theta_prime + 1e-9);
        ++cases;
      }
    }
  }
  EXPECT_EQ(cases, 100);
  EXPECT_LE(worst, 1e-8);
}

TEST(Perturbation, TorusConstantLambdaFlattensRicci) {
  // Brackets on the torus: a = b = d = 0, c = -4 pi^2, so Q = theta' / 2 for every lambda.
  const auto cd = model("torus_xi_n");
  const auto r = ricci_perturbed_closed_form(cd, {ScalarField(0.7), ScalarField(1.0)}, {0.2, 0.3, 0.4});
  EXPECT_NEAR(r.P_total, 0.0, 1e-12);
  EXPECT_NEAR(r.Q_total, kPi, 1e-10);
  EXPECT_NEAR(r.ricci, 0.0, 1e-9);
}

TEST(Sweep, TorusAtCeilingReturnsZero) {
  const auto cd = model("torus_xi_n");
  const auto r = sweep_lower_ricci(cd, 0.5 * cd.theta_prime * cd.theta_prime);
  EXPECT_EQ(r.lambda, 0.0);
  EXPECT_NEAR(r.max_oracle, 0.0, 1e-9);
}

TEST(Sweep, KContactRejected) {
  EXPECT_THROW(sweep_lower_ricci(model("heisenberg_r3"), 0.0), InvalidInput);
  EXPECT_THROW(sweep_lower_ricci(model("mapping_torus_box"), 1.0), InvalidInput);
}

TEST(Sweep, CeilingEnforced) {
  const auto cd = perturbed_torus(2);
  EXPECT_THROW(sweep_lower_ricci(cd, 2.5), InvalidInput);
}

TEST(Sweep, TwistedPerturbedTorusBelowZero) {
  ModelParams p = small_grid();
  p.twist = 1;
  p.base_perturbation = {0.3, 0.2, 4};
  const auto cd = model_manifold("mapping_torus_box", p);
  const auto r = sweep_lower_ricci(cd, 0.0);
  EXPECT_LT(r.max_closed, 0.0);
  EXPECT_LT(r.max_oracle, 0.0);
  EXPECT_NEAR(r.max_closed, r.max_oracle, 1e-8);
  EXPECT_EQ(r.points, cd.domain.quadrature().size());
}

TEST(Sweep, ExhaustedBracketNamesPoints) {
  // The twisted torus has Ricci_lambda = 2 - 2 Q^2 with Q constant in lambda near the floor.
  const auto cd = perturbed_torus(3);
  SweepOptions o;
  o.bracket_limit = 0.5;
  o.samples_per_side = 2;
  try {
    sweep_lower_ricci(cd, -1e6, o);
    FAIL() << "expected ComputationError";
  } catch (const ComputationError& e) {
    EXPECT_NE(std::string(e.what()).find("blocking points"), std::string::npos);
  }
}

TEST(Smoothstep, ValuesAndDerivatives) {
  const auto h = smoothstep_band(1.0, 0.2);
  EXPECT_EQ(h(Vec3d{0, 0, 0.5}), 0.0);
  EXPECT_NEAR(h(Vec3d{0, 0, 1.0}), 1.0, 1e-12);
  EXPECT_NEAR(h(Vec3d{0, 0, 0.9}), 0.5, 1e-15);
  const Jet j = chart::evaluate_jet(h, {0, 0, 0.85}, 2, chart::Backend::Analytic, nullptr);
  const double s = 0.25;
  EXPECT_NEAR(j.d(2), 30.0 * s * s * (1 - s) * (1 - s) / 0.2, 1e-12);
  EXPECT_NEAR(j.d2(2, 2), (60.0 * s - 180.0 * s * s + 120.0 * s * s * s) / 0.04, 1e-9);
  EXPECT_THROW(smoothstep_band(1.0, 0.0), InvalidInput);
}

TEST(LocalRealize, CeilingTargetIsIdentityOnTorusBox) {
  // Mapping torus is K-contact: f = theta'^2 / 2 is realized by the original structure.
  const auto cd = model("mapping_torus_box");
  RealizeOptions o;
  o.step = 0.05;
  const auto sol = local_realize(cd, ScalarField(2.0), unit_box(3, 4), o);
  for (const auto& s : sol.samples) {
    EXPECT_NEAR(s.eta, 1.0, 1e-14);
    EXPECT_NEAR(s.mu, 0.0, 1e-14);
  }
  EXPECT_LE(sol.residual_sup, 1e-10);
  EXPECT_GT(sol.clamp_events, 0u);
}

TEST(LocalRealize, ZeroTargetIsExactOnHeisenberg) {
  ModelParams p = small_grid();
  const auto cd = model_manifold("heisenberg_r3", p);
  RealizeOptions o;
  o.step = 0.1;
  const auto sol = local_realize(cd, ScalarField(0.0), unit_box(3, 5), o);
  for (const auto& s : sol.samples) {
    EXPECT_NEAR(s.eta, 1.0, 1e-14);
    EXPECT_NEAR(s.mu, 2.0 * s.point[2], 1e-12);
  }
  EXPECT_LE(sol.residual_sup, 1e-10);
  EXPECT_EQ(sol.max_ricci_excess, 0.0);
}

TEST(LocalRealize, SinSquaredTarget) {
  const auto cd = model("mapping_torus_box");
  RealizeOptions o;
  o.step = 1e-2;
  const auto sol = local_realize(cd, sin_squared_target(), unit_box(3, 8), o);
  EXPECT_LE(sol.residual_sup, 1e-3);
  EXPECT_LE(sol.boundary_residual, 1e-14);
  EXPECT_EQ(sol.max_ricci_excess, 0.0);
  EXPECT_EQ(sol.samples.size(), 72u);
}

TEST(LocalRealize, PerturbedBaseReachesTarget) {
  const auto cd = perturbed_torus(6);
  RealizeOptions o;
  o.step = 1e-2;
  const ScalarField f = 1.0 + 0.5 * random_smooth_field(9, cd.domain);
  const auto sol = local_realize(cd, f, unit_box(3, 6), o);
  EXPECT_LE(sol.residual_sup, 1e-3);
  EXPECT_LE(sol.boundary_residual, 1e-13);
  EXPECT_EQ(sol.clamp_events, 0u);
}

TEST(LocalRealize, RefinementReducesResidual) {
  const auto cd = perturbed_torus(6);
  const ScalarField f = 1.0 + 0.5 * random_smooth_field(9, cd.domain);
  RealizeOptions coarse, fine;
  coarse.step = 1.0 / 16;
  fine.step = 1.0 / 32;
  const auto a = local_realize(cd, f, unit_box(3, 5), coarse);
  const auto b = local_realize(cd, f, unit_box(3, 5), fine);
  EXPECT_GT(a.residual_sup, 1e-12);
  EXPECT_GE(a.residual_sup / b.residual_sup, 4.0) << a.residual_sup << " " << b.residual_sup;
  EXPECT_LE(a.residual_sup, 1e-2);
}

TEST(LocalRealize, AdmissibilityViolationReportsPoint) {
  const auto cd = model("mapping_torus_box");
  const ScalarField f = 2.0 + 0.1 * kZ;
  try {
    local_realize(cd, f, unit_box(3, 4));
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_GT(e.value(), e.ceiling());
    EXPECT_EQ(e.ceiling(), 2.0);
  }
}

TEST(LocalRealize, RequiresReebAlongZ) {
  const auto cd = model("torus_xi_n");
  FlowBox b;
  b.x = {0.1, 0.9};
  b.y = {0.1, 0.9};
  b.T = 0.5;
  EXPECT_THROW(local_realize(cd, ScalarField(0.0), b), InvalidInput);
}

TEST(LocalRealize, FieldsRejectPointsOutsideBox) {
  const auto cd = model("mapping_torus_box");
  RealizeOptions o;
  o.step = 0.1;
  o.verify = false;
  const auto sol = local_realize(cd, ScalarField(1.0), unit_box(2, 2), o);
  EXPECT_THROW(sol.ell(Vec3d{0.45, 0.0, 0.5}), InvalidInput);
  EXPECT_NO_THROW(sol.ell(Vec3d{0.3, 0.0, 0.5}));
}

TEST(AlmostGlobal, SmallRun) {
  const auto cd = model("mapping_torus_box");
  GlobalOptions o;
  o.epsilon = 0.2;
  o.n_max = 3;
  o.step = 0.02;
  o.seeds = {3, 3};
  o.tau_cells = 8;
  o.band_cells = 4;
  o.residual_tau_samples = 4;
  const auto r = almost_global_realize(cd, sin_squared_target(), o);
  ASSERT_EQ(r.elements.size(), 4u);
  for (std::size_t n = 0; n < r.elements.size(); ++n) {
    const auto& el = r.elements[n];
    EXPECT_LE(el.residual_outside_band, 1e-3) << n;
    EXPECT_EQ(el.max_ricci_excess, 0.0) << n;
    EXPECT_GT(el.min_eigenvalue, 0.0) << n;
    EXPECT_LE(el.band_volume, 0.5 * el.epsilon) << n;
    if (n > 0) EXPECT_NEAR(el.delta, 0.5 * r.elements[n - 1].delta, 1e-15);
  }
  EXPECT_LE(r.max_volume_drift, 1e-10 * r.reference_volume);
  const auto report = metric::convergence_report(r.sequence, r.limit);
  EXPECT_TRUE(report.summable);
  EXPECT_TRUE(report.nullset);
  EXPECT_TRUE(report.pointwise);
  EXPECT_GE(report.sqrt_eps_fit.r2, 0.99);
  EXPECT_NEAR(report.sqrt_eps_fit.slope, 1.0, 0.1);
}

TEST(AlmostGlobal, EpsilonTooLarge) {
  GlobalOptions o;
  o.epsilon = 10.0;
  o.step = 0.1;
  EXPECT_THROW(almost_global_realize(model("mapping_torus_box"), ScalarField(1.0), o), InvalidInput);
  EXPECT_THROW(almost_global_realize(model("heisenberg_r3"), ScalarField(1.0), o), InvalidInput);
}
