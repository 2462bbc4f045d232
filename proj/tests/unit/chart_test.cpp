#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "rr/chart/calculus.hpp"
#include "rr/chart/csv.hpp"
#include "rr/chart/domain.hpp"
#include "rr/chart/expression.hpp"
#include "rr/chart/field.hpp"
#include "rr/errors.hpp"

using namespace rr;
using namespace rr::chart;
constexpr double kPi = std::numbers::pi;

namespace {

// Random cubic polynomial in x, y, z with coefficients in [-1, 1].
ScalarField random_poly(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const ScalarField x = ScalarField::coordinate(0), y = ScalarField::coordinate(1), z = ScalarField::coordinate(2);
  ScalarField f(u(rng));
  f = f + u(rng) * x + u(rng) * y + u(rng) * z;
  f = f + u(rng) * x * y + u(rng) * y * z + u(rng) * z * x + u(rng) * x * x;
  f = f + u(rng) * x * y * z + u(rng) * z * z * z;
  return f;
}

VectorField random_vector(std::mt19937& rng) { return {random_poly(rng), random_poly(rng), random_poly(rng)}; }

}  // namespace

TEST(Domain, ValidatesInvariants) {
  EXPECT_THROW(ChartDomain({Interval{0, 0}, Interval{0, 1}, Interval{0, 1}}, {false, false, false}, {4, 4, 4}),
               InvalidInput);
  EXPECT_THROW(ChartDomain({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {false, false, false}, {3, 4, 4}),
               InvalidInput);
  EXPECT_THROW(ChartDomain({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {false, false, false}, {4, 4, 4}, 0.5),
               InvalidInput);
  EXPECT_NO_THROW(ChartDomain({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {true, true, true}, {4, 4, 4}, 0.7));
}

TEST(Domain, PeriodicWrapIsValueExact) {
  const auto dom = ChartDomain::unit_torus(4);
  const Vec3d w = dom.wrap({1.25, -0.25, 3.0});
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
  EXPECT_DOUBLE_EQ(w[2], 0.0);
  const ChartDomain box({Interval{-1, 1}, Interval{-1, 1}, Interval{0, 1}}, {false, false, true}, {4, 4, 4}, 0.1);
  EXPECT_TRUE(box.contains({0.5, 0.5, 7.5}));
  EXPECT_FALSE(box.contains({1.5, 0.0, 0.0}));
  EXPECT_FALSE(box.in_interior({0.95, 0.0, 0.0}));
}

TEST(Domain, QuadratureExcludesMargins) {
  const ChartDomain box({Interval{0, 2}, Interval{0, 1}, Interval{0, 1}}, {false, false, true}, {4, 5, 6}, 0.25);
  const auto q = box.quadrature();
  EXPECT_EQ(q.size(), 4u * 5u * 6u);
  EXPECT_NEAR(q.total_weight(), 1.5 * 0.5 * 1.0, 1e-14);
  for (const auto& p : q.points) EXPECT_TRUE(box.in_interior(p));
}

TEST(EvaluateJet, ConstantFieldHasZeroPartials) {
  const Jet j = evaluate_jet(ScalarField(3.5), {0.1, 0.2, 0.3}, 1);
  EXPECT_DOUBLE_EQ(j.value(), 3.5);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(j.d(a), 0.0);
}

TEST(EvaluateJet, SineDerivative) {
  const ScalarField f = parse_expression("sin(2*pi*z)");
  const Jet j = evaluate_jet(f, {0.3, 0.4, 0.0}, 1);
  EXPECT_NEAR(j.d(2), 2 * kPi, 1e-14);
  EXPECT_EQ(j.d(0), 0.0);
}

TEST(EvaluateJet, FiniteDifferenceAgreesWithAnalytic) {
  const ScalarField f = parse_expression("exp(x) * y^2");
  const Vec3d p{0.3, -0.8, 0.5};
  const Jet a = evaluate_jet(f, p, 2);
  const Jet d = evaluate_jet(f, p, 2, Backend::FiniteDifference);
  for (int m = 0; m < jet_size(2); ++m) EXPECT_NEAR(a.coeff(m), d.coeff(m), 1e-8) << m;
}

TEST(EvaluateJet, FiniteDifferenceHigherOrders) {
  const ScalarField f = parse_expression("sin(x + 2*y) * cos(z)");
  const Vec3d p{0.2, 0.1, -0.4};
  const Jet a = evaluate_jet(f, p, 4);
  const Jet d = evaluate_jet(f, p, 4, Backend::FiniteDifference);
  for (int m = 0; m < jet_size(4); ++m) EXPECT_NEAR(a.coeff(m), d.coeff(m), 1e-5) << m;
}

TEST(EvaluateJet, FiniteDifferenceFlagsNonSmoothSamples) {
  const ScalarField kink = ScalarField::sampled([](const Vec3d& p) { return std::fabs(p[0]); }, "abs");
  EXPECT_THROW(evaluate_jet(kink, {0.0, 0.0, 0.0}, 2), ComputationError);
}

TEST(EvaluateJet, SampledFieldComposesInsideExpressions) {
  const ScalarField s = ScalarField::sampled([](const Vec3d& p) { return p[0] * p[0] * p[1]; }, "x2y");
  const ScalarField f = s * ScalarField::coordinate(2);
  EXPECT_FALSE(f.analytic());
  const Jet j = evaluate_jet(f, {0.5, 2.0, 3.0}, 2);
  EXPECT_NEAR(j.d(0), 2 * 0.5 * 2.0 * 3.0, 1e-8);
  EXPECT_NEAR(j.d2(0, 2), 2 * 0.5 * 2.0, 1e-7);
}

TEST(EvaluateJet, RejectsPointsOutsideBounds) {
  const ChartDomain box({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {false, false, true}, {4, 4, 4});
  EXPECT_THROW(evaluate_jet(ScalarField(1.0), {2.0, 0.5, 0.5}, 1, Backend::Analytic, &box), InvalidInput);
  EXPECT_NO_THROW(evaluate_jet(ScalarField(1.0), {0.5, 0.5, 9.5}, 1, Backend::Analytic, &box));
}

TEST(Expression, ParsesDialect) {
  const ScalarField f = parse_expression("2 - 2*sin(2*pi*tau)^2 + -x/4 + exp(y)*log(2) + sqrt(4)");
  const Vec3d p{1.0, 0.5, 0.1};
  const double expect = 2 - 2 * std::pow(std::sin(2 * kPi * 0.1), 2) - 0.25 + std::exp(0.5) * std::log(2.0) + 2;
  EXPECT_NEAR(f(p), expect, 1e-14);
  EXPECT_NEAR(parse_expression("2^3^2")(p), 512.0, 1e-12);
  EXPECT_NEAR(parse_expression("1e-3 * 2.5E2")(p), 0.25, 1e-15);
  EXPECT_TRUE(parse_expression("3 * (2 + 1)").is_constant());
}

TEST(Expression, ReportsErrors) {
  EXPECT_THROW(parse_expression("sin(x"), InvalidInput);
  EXPECT_THROW(parse_expression("foo(x)"), InvalidInput);
  EXPECT_THROW(parse_expression("x + "), InvalidInput);
  EXPECT_THROW(parse_expression("x y"), InvalidInput);
  EXPECT_THROW(parse_expression("x $ 2"), InvalidInput);
}

TEST(LieBracket, CoordinateExample) {
  const VectorField u{ScalarField(1.0), ScalarField(0.0), ScalarField(0.0)};
  const VectorField v{ScalarField(0.0), ScalarField::coordinate(0), ScalarField(0.0)};
  const Vec3d b = values(lie_bracket(u, v, {0.3, 0.2, 0.1}));
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
  EXPECT_NEAR(b[2], 0.0, 1e-15);
}

TEST(LieBracket, SelfBracketVanishes) {
  std::mt19937 rng(1);
  const auto u = random_vector(rng);
  const Vec3d b = values(lie_bracket(u, u, {0.3, -0.2, 0.7}));
  for (double c : b) EXPECT_EQ(c, 0.0);
}

TEST(LieBracket, RotatingFrameAgainstSymbolicOracle) {
  const VectorField dz{ScalarField(0.0), ScalarField(0.0), ScalarField(1.0)};
  const VectorField x{parse_expression("cos(2*pi*z)"), parse_expression("-sin(2*pi*z)"), ScalarField(0.0)};
  for (double z : {0.0, 0.1, 0.37, 0.8}) {
    const Vec3d b = values(lie_bracket(dz, x, {0.2, 0.4, z}));
    EXPECT_NEAR(b[0], -2 * kPi * std::sin(2 * kPi * z), 1e-13);
    EXPECT_NEAR(b[1], -2 * kPi * std::cos(2 * kPi * z), 1e-13);
    EXPECT_NEAR(b[2], 0.0, 1e-15);
  }
}

TEST(LieBracket, AntisymmetryAndJacobiOnRandomPolynomials) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> pick(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_vector(rng), v = random_vector(rng), w = random_vector(rng);
    const Vec3d p{pick(rng), pick(rng), pick(rng)};
    const auto ju = evaluate_jet(u, p, 2), jv = evaluate_jet(v, p, 2), jw = evaluate_jet(w, p, 2);
    const Vec3d uv = values(lie_bracket(ju, jv)), vu = values(lie_bracket(jv, ju));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(uv[i], -vu[i], 1e-12);
    const auto j1 = lie_bracket(ju, lie_bracket(jv, jw));
    const auto j2 = lie_bracket(jv, lie_bracket(jw, ju));
    const auto j3 = lie_bracket(jw, lie_bracket(ju, jv));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(j1[i].value() + j2[i].value() + j3[i].value(), 0.0, 1e-11);
  }
}

TEST(ExteriorDerivative, Examples) {
  const OneForm dz{ScalarField(0.0), ScalarField(0.0), ScalarField(1.0)};
  const Mat3d d0 = values(exterior_derivative(dz, {0.1, 0.2, 0.3}));
  EXPECT_EQ(max_abs(d0), 0.0);

  const OneForm std_form{-ScalarField::coordinate(1), ScalarField(0.0), ScalarField(1.0)};
  const Mat3d d1 = values(exterior_derivative(std_form, {0.4, -0.3, 0.2}));
  EXPECT_DOUBLE_EQ(d1[0][1], 1.0);
  EXPECT_DOUBLE_EQ(d1[1][0], -1.0);
  EXPECT_EQ(d1[0][2], 0.0);
  EXPECT_EQ(d1[1][2], 0.0);

  const OneForm t3{parse_expression("cos(2*pi*z)"), parse_expression("-sin(2*pi*z)"), ScalarField(0.0)};
  for (double z : {0.05, 0.3, 0.61}) {
    const Vec3d p{0.1, 0.2, z};
    const Mat3d d = values(exterior_derivative(t3, p));
    const Vec3d e{std::sin(2 * kPi * z), std::cos(2 * kPi * z), 0.0};
    EXPECT_NEAR(apply_two_form(d, e, Vec3d{0, 0, 1}), 2 * kPi, 1e-13);
  }
}

TEST(ExteriorDerivative, ClosedOnRandomForms) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pick(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const OneForm w = random_vector(rng);
    const Vec3d p{pick(rng), pick(rng), pick(rng)};
    const JetMat dw = exterior_derivative(evaluate_jet(w, p, 2));
    // d(dw) coefficient of dx^dy^dz
    const double ddw = dw[1][2].d(0) + dw[2][0].d(1) + dw[0][1].d(2);
    EXPECT_NEAR(ddw, 0.0, 1e-12);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(dw[i][j].value(), -dw[j][i].value());
  }
}

TEST(Integrate, UnitAndConstantDensities) {
  const auto cube = ChartDomain::unit_torus(8);
  EXPECT_NEAR(integrate_density(ScalarField(1.0), cube).value, 1.0, 1e-14);
  const ChartDomain box({Interval{-1, 1}, Interval{0, 3}, Interval{0, 1}}, {false, false, true}, {6, 6, 6});
  EXPECT_NEAR(integrate_density(ScalarField(2.5), box).value, 2.5 * 6.0, 1e-13);
}

TEST(Integrate, SineSquaredOnTorus) {
  const auto cube = ChartDomain::unit_torus(8);
  const auto est = integrate_density(parse_expression("sin(2*pi*z)^2"), cube, true, 1e-10);
  EXPECT_NEAR(est.value, 0.5, 1e-12);
  EXPECT_NEAR(est.refined_value, 0.5, 1e-12);
}

TEST(Integrate, LinearAndMonotone) {
  const ChartDomain box({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {false, false, false}, {8, 8, 8}, 0.1);
  const ScalarField f = parse_expression("x*y + z^2");
  const ScalarField g = parse_expression("exp(-x) + 1");
  const double a = integrate_density(f, box).value, b = integrate_density(g, box).value;
  EXPECT_NEAR(integrate_density(2.0 * f - 3.0 * g, box).value, 2 * a - 3 * b, 1e-13);
  EXPECT_LE(a, integrate_density(f + parse_expression("x^2"), box).value);
  const auto coarse = integrate_density(f, box).value;
  const auto fine = integrate_density(f, box.refined()).value;
  const auto finer = integrate_density(f, box.refined().refined()).value;
  EXPECT_LT(std::fabs(finer - fine), std::fabs(fine - coarse));
}

TEST(Integrate, RejectsNonFiniteSamples) {
  const auto cube = ChartDomain::unit_torus(4);
  EXPECT_THROW(integrate_density(parse_expression("log(x - 0.5)"), cube), ComputationError);
}

TEST(Csv, RoundTripPrecision) {
  const auto path = std::filesystem::temp_directory_path() / "rr_csv_test.csv";
  const double v = 0.1 + 0.2;
  write_csv(path, {"x", "value"}, {{v, -1.0 / 3.0}});
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "x,value");
  EXPECT_EQ(std::stod(row.substr(0, row.find(','))), v);
  std::filesystem::remove(path);
}
