#pragma once

#include <functional>

#include "rr/chart/domain.hpp"
#include "rr/chart/field.hpp"

namespace rr::chart {

/// [u,v]^i = u^j d_j v^i - v^j d_j u^i, from jets of order >= 1. The result has one order less.
JetVec lie_bracket(const JetVec& u, const JetVec& v);

/// (d w)_ij = d_i w_j - d_j w_i, from a one-form jet of order >= 1.
JetMat exterior_derivative(const JetVec& w);

/// Bracket of two vector fields at a point, returned as a jet of the given order.
JetVec lie_bracket(const VectorField& u, const VectorField& v, const Vec3d& p, int order = 0,
                   Backend backend = Backend::Analytic, const FdOptions& fd = {});

/// Exterior derivative of a one-form at a point, returned as a jet of the given order.
JetMat exterior_derivative(const OneForm& w, const Vec3d& p, int order = 0, Backend backend = Backend::Analytic,
                           const FdOptions& fd = {});

/// Coefficient of w ^ dw against dx ^ dy ^ dz.
template <class T>
T wedge_with_differential(const Vec3<T>& w, const Mat3<T>& dw) {
  return w[0] * dw[1][2] + w[1] * dw[2][0] + w[2] * dw[0][1];
}

/// Two-form applied to a pair of vectors.
template <class T>
T apply_two_form(const Mat3<T>& omega, const Vec3<T>& u, const Vec3<T>& v) {
  return bilinear(omega, u, v);
}

using Density = std::function<double(const Vec3d&)>;

/// Weighted sum of the density over the quadrature; throws on non-finite samples.
double integrate(const Density& rho, const Quadrature& q);

struct IntegralEstimate {
  double value = 0.0;          // on the requested grid
  double refined_value = 0.0;  // on the doubled grid (equal to value if not checked)
  double change() const { return refined_value - value; }
};

/// Midpoint integral over the sampled region of `dom`.
///
/// With `check_refinement` the grid is doubled and ComputationError is thrown when
/// the two results differ by more than `tolerance` (absolute).
IntegralEstimate integrate_density(const Density& rho, const ChartDomain& dom, bool check_refinement = false,
                                   double tolerance = 1e-8);

inline IntegralEstimate integrate_density(const ScalarField& rho, const ChartDomain& dom,
                                          bool check_refinement = false, double tolerance = 1e-8) {
  return integrate_density(Density([&rho](const Vec3d& p) { return rho(p); }), dom, check_refinement, tolerance);
}

}  // namespace rr::chart
