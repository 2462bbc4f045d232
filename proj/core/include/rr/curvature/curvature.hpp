#pragma once

#include <array>
#include <vector>

#include "rr/contact/contact.hpp"
#include "rr/contact/metric.hpp"
#include "rr/tensor.hpp"

namespace rr::curvature {

using contact::ContactData;
using contact::FramePoint;
using contact::MetricField;

/// Tolerance rungs: exact identities with analytic jets, anything involving RK4 or FD.
inline constexpr double kIdentityTol = 1e-6;
inline constexpr double kDiscretizationTol = 1e-3;
inline double identity_tolerance(chart::Backend b) {
  return b == chart::Backend::Analytic ? kIdentityTol : kDiscretizationTol;
}

/// gamma[k][i][j] = Gamma^k_ij.
using Christoffel = std::array<Mat3d, 3>;
using ChristoffelJets = std::array<JetMat, 3>;

/// Levi-Civita symbols from metric jets of order K >= 1; the result has order K - 1.
ChristoffelJets christoffel_jets(const JetMat& g);
Christoffel christoffel_values(const JetMat& g);
Christoffel christoffel_oracle(const MetricField& g, const Vec3d& p);

/// max |nabla_k g_ij| for the connection `gamma`, from metric jets of order >= 1.
double metric_compatibility_residual(const JetMat& g, const Christoffel& gamma);

/// Covariant derivative nabla_u V from the jets of V (order >= 1) and Gamma at the point.
Vec3d covariant_derivative(const Christoffel& gamma, const JetVec& v, const Vec3d& u);

/// Riemann tensor r[l][i][j][k] = R^l_ijk, with R(d_i, d_j) d_k = R^l_ijk d_l.
struct Riemann {
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> r{};
  /// R(u, v) w.
  Vec3d apply(const Vec3d& u, const Vec3d& v, const Vec3d& w) const;
};

/// From metric jets of order >= 2.
Riemann riemann(const JetMat& g);

/// g(R(u,v)v, u) / (|u|^2 |v|^2 - g(u,v)^2); throws InvalidInput on a degenerate plane.
double sectional(const Riemann& R, const Mat3d& g, const Vec3d& u, const Vec3d& v);
double sectional_oracle(const MetricField& g, const Vec3d& p, const Vec3d& u, const Vec3d& v);

/// k(e, X) + k(Je, X) for the seeded frame, from the Levi-Civita oracle only.
double ricci_reeb_oracle(const ContactData& cd, const Vec3d& p);

struct PQ {
  double P = 0.0;  // g(e, nabla_e X)
  double Q = 0.0;  // theta'/2 - g(Je, nabla_e X)
  double ricci = 0.0;
};

/// P, Q and -2P^2 + theta'^2/2 - 2Q^2 from brackets and d alpha along the frame `fp`.
///
/// Only fp.point and fp.angle are used: the frame is regenerated as jets.
PQ pq_ricci(const ContactData& cd, const FramePoint& fp);
/// Same from structure functions (a, b, c, d) and theta'.
PQ pq_from_structure(double a, double b, double c, double theta_prime);

struct ReebDerivative {
  Vec3d closed{};        // J(theta'/2 e - 1/2 (L_X J) e)
  Vec3d oracle{};        // e^j (d_j X + Gamma_j X)
  double residual = 0.0; // |closed - oracle|
  double normal = 0.0;   // g(nabla_e X, X)
};

/// Throws InvalidInput if e is not in ker(alpha) to 1e-8 relative.
ReebDerivative covariant_reeb_derivative(const ContactData& cd, const Vec3d& p, const Vec3d& e);

struct SecondFundamental {
  std::array<std::array<double, 2>, 2> ii{};  // II(e_a, e_b) = -g(e_b, nabla_{e_a} X), frame (e, Je)
  double H = 0.0;
  double G = 0.0;
};

SecondFundamental second_fundamental(const ContactData& cd, const Vec3d& p);

/// Push-forwards of v0 and J v0 along the Reeb flowline through p.
struct JacobiPath {
  std::vector<double> t;
  std::vector<Vec3d> x;          // flowline
  std::vector<Vec3d> v;          // e~(t)
  std::vector<Vec3d> w;          // e~perp(t)
  std::vector<Vec3d> e;          // e~(t) / |e~(t)|
  std::vector<double> beta;      // angle between e~ and e~perp
  std::vector<double> area;      // |e~| |e~perp| sin beta
  double max_alpha_leak = 0.0;   // max |alpha(e~)| / |e~|
  /// max_t |area(t) - area(0)| / area(0).
  double area_drift() const;
};

/// RK4 on x' = X(x), v' = DX(x) v, w' = DX(x) w with `steps` steps over [0, T] (T may be negative).
/// Throws InvalidInput if v0 is not in ker(alpha) or the flowline leaves a non-periodic axis.
JacobiPath alpha_jacobi_propagate(const ContactData& cd, const Vec3d& p, const Vec3d& v0, double T, int steps);

/// max over every `stride`-th sample of |D_t^2 v + R(v, X) X| / max(1, |v|). D_t^2 v is differentiated
/// exactly along the flow from second jets, so the residual measures only the error in v.
double jacobi_equation_residual(const ContactData& cd, const JacobiPath& path, int stride = 50);

/// k(e, X) = g(Je, nabla_e X)^2 - g(e, nabla_e X)^2 - d/dt g(e(t), nabla_{e(t)} X) at t = 0.
///
/// The derivative is a central difference with dt = 1e-3 and one Richardson level.
double sectional_via_jacobi(const ContactData& cd, const Vec3d& p, const Vec3d& e, double dt = 1e-3);

inline constexpr int kSweepDirections = 32;

struct Equivalence {
  bool ricci_max = false;   // Ricci(X) = theta'^2 / 2
  bool geodesible = false;  // g(e, nabla_e X) = 0 for all unit e in xi
  bool lxj_zero = false;
  bool lxg_zero = false;
  double ricci_gap = 0.0;   // theta'^2 / 2 - Ricci(X)
  double sweep_max = 0.0;   // max |g(u, nabla_u X)| over the sweep
  double lxj_norm = 0.0;    // Frobenius norm of L_X J on the (e, Je) block
  double lxg_norm = 0.0;    // Frobenius norm of L_X g on the (e, Je) block
  int zero_directions = 0;  // unit directions with g(u, nabla_u X) = 0
  std::array<double, kSweepDirections> sweep{};
  bool agree() const { return ricci_max == geodesible && geodesible == lxj_zero && lxj_zero == lxg_zero; }
};

/// Tests the four conditions with thresholds tau, sqrt(tau/2), 2 sqrt(tau), 2 sqrt(tau); each
/// equals 2 (P^2 + Q^2) <= tau after converting between the quantities.
Equivalence max_ricci_equivalence(const ContactData& cd, const Vec3d& p, double tau = kIdentityTol);

/// Counts zeros of a cyclic sample sequence: exact zeros (|s| <= floor) plus sign changes between
/// adjacent nonzero samples.
int count_cyclic_zeros(const double* s, int n, double floor);

struct CurvatureReport {
  Vec3d point{};
  double P = 0.0, Q = 0.0;
  double ricci_closed = 0.0, ricci_oracle = 0.0;
  double k_e = 0.0, k_je = 0.0;
  double G = 0.0, H = 0.0;
  double ricci_residual = 0.0;        // |closed - oracle|
  double gauss_residual = 0.0;        // |oracle - 2G|
  double bound_excess = 0.0;          // max(0, oracle - theta'^2 / 2)
  double reeb_derivative_residual = 0.0;
  double geodesic_residual = 0.0;     // |nabla_X X|
  double divergence = 0.0;            // g(e, nabla_e X) + g(Je, nabla_Je X)
  double compatibility_residual = 0.0;
};

CurvatureReport curvature_report(const ContactData& cd, const Vec3d& p);

struct CurvatureSweep {
  std::vector<CurvatureReport> reports;
  std::size_t skipped = 0;
  double worst_ricci = 0.0, worst_gauss = 0.0, worst_bound = 0.0, worst_H = 0.0;
  double worst_reeb_derivative = 0.0, worst_geodesic = 0.0, worst_compatibility = 0.0;
  bool skipped_ok() const;  // at most 1% skipped
};

/// Reports at every point; points with a degenerate frame are skipped and counted.
CurvatureSweep sweep_curvature(const ContactData& cd, const std::vector<Vec3d>& points);

}  // namespace rr::curvature
