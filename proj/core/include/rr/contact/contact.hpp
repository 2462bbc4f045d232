#pragma once

#include <string>
#include <vector>

#include "rr/chart/domain.hpp"
#include "rr/chart/field.hpp"
#include "rr/contact/metric.hpp"
#include "rr/tensor.hpp"

namespace rr::contact {

using chart::Backend;

/// A contact form with a compatible complex structure on a chart.
///
/// J is stored through its action on one section e of ker(alpha): J e = je and
/// J je = -e, with J(X) = 0 on the Reeb direction. The section must satisfy
/// d alpha(e, je) = theta_prime so that (e, je, X) is g-orthonormal.
struct ContactData {
  std::string name;
  chart::OneForm alpha;
  double theta_prime = 1.0;
  chart::VectorField e;
  chart::VectorField je;
  chart::ChartDomain domain;
  Backend backend = Backend::Analytic;
  chart::FdOptions fd;
  /// Free-form remarks carried into reports (model caveats, perturbation provenance).
  std::vector<std::string> notes;

  ContactData with_backend(Backend b) const;
};

/// Jets of every contact quantity at one point.
///
/// alpha carries order K + 1; everything else carries order K.
struct ContactJets {
  int order = 0;
  JetVec alpha;
  JetMat dalpha;
  Jet density;  // coefficient of alpha ^ d alpha against dx ^ dy ^ dz
  JetVec reeb;
  JetVec e, je;
  JetMat J;
  JetMat g;
};

/// Evaluates a vector-valued field of `cd` with its backend and domain wrap.
JetVec field_jets(const ContactData& cd, const chart::VectorField& v, const Vec3d& p, int order);

/// Throws InvalidInput outside the chart and ComputationError where the form is not contact.
ContactJets contact_jets(const ContactData& cd, const Vec3d& p, int order);

/// Only the Reeb field, as jets of the given order (alpha is evaluated at order + 1).
JetVec reeb_jets(const ContactData& cd, const Vec3d& p, int order);

/// Reeb vector from the values of alpha and d alpha (cross-product closed form).
template <class T>
Vec3<T> reeb_from(const Vec3<T>& a, const Mat3<T>& da) {
  const Vec3<T> w{da[1][2], da[2][0], da[0][1]};
  const T inv = T(1.0) / dot(a, w);
  return {w[0] * inv, w[1] * inv, w[2] * inv};
}

struct ReebSolution {
  Vec3d reeb{};
  double alpha_residual = 0.0;   // |alpha(X) - 1|
  double kernel_residual = 0.0;  // max_i |d alpha(X, d_i)|
};

/// Solves alpha(X) = 1, d alpha(X, .) = 0 as a least-squares 4x3 system.
///
/// `basis_scale` rescales the chart basis used for the solve; the answer is
/// mapped back, so it must not depend on the scale. Throws ComputationError on
/// a singular system.
ReebSolution reeb_field(const chart::OneForm& alpha, const Vec3d& p, Backend backend = Backend::Analytic,
                        const Vec3d& basis_scale = {1.0, 1.0, 1.0});

struct ContactCheck {
  double min_density = 0.0;
  double max_density = 0.0;
  Vec3d argmin{};
  std::size_t samples = 0;
  bool passed() const { return min_density > 0.0; }
};

/// Grid minimum of the alpha ^ d alpha coefficient over the sampled region.
ContactCheck verify_contact(const chart::OneForm& alpha, const chart::ChartDomain& dom,
                            Backend backend = Backend::Analytic);

/// The compatible metric g = (1/theta') d alpha(., J .) + alpha (x) alpha.
///
/// Checks positive definiteness on the sampled grid and throws InvalidInput
/// naming the first failing point.
MetricField build_compatible_metric(const ContactData& cd);

/// Metric field without the grid check (used for derived structures already validated).
MetricField compatible_metric(const ContactData& cd);

struct ValidationReport {
  double alpha_reeb_residual = 0.0;      // max |alpha(X) - 1|
  double kernel_residual = 0.0;          // max |d alpha(X, .)|
  double section_residual = 0.0;         // max |alpha(e)|, |alpha(Je)|
  double rotation_residual = 0.0;        // max |d alpha(e, Je) - theta'|
  double complex_residual = 0.0;         // max |J^2 + id| on ker(alpha)
  double symmetry_residual = 0.0;        // max |g - g^T| before symmetrization
  double min_eigenvalue = 0.0;           // smallest eigenvalue of g over the grid
  double volume_residual = 0.0;          // max |sqrt det g - density / theta'|
  double min_density = 0.0;              // min alpha ^ d alpha coefficient
  double unit_reeb_residual = 0.0;       // max |g(X, X) - 1|
  std::size_t samples = 0;
  bool passed(double tol) const;
};

/// Worst-case residual of every ContactData invariant over the sampled grid.
ValidationReport validate(const ContactData& cd);

/// An adapted frame at a point.
struct FramePoint {
  Vec3d point{};
  Vec3d e{}, je{}, x{};
  int seed_axis = 0;   // coordinate field that was projected onto ker(alpha)
  double angle = 0.0;  // constant rotation applied inside ker(alpha)
};

/// Jets of a local frame (e, Je, X) together with d alpha.
struct FrameJets {
  JetVec e, je, x;
  JetMat dalpha;
  int order = 0;
};

/// The stored section of `cd` and its J-image.
FrameJets section_frame(const ContactData& cd, const Vec3d& p, int order);

/// The seeded local frame: project d_x (or d_y when degenerate) onto ker(alpha)
/// along X, scale so d alpha(e, Je) = theta', then rotate by `angle`.
FrameJets seeded_frame(const ContactData& cd, const Vec3d& p, int order, double angle = 0.0,
                       int* seed_axis = nullptr);

/// Same as above from precomputed contact jets; the frame has the order of `cj`.
FrameJets seeded_frame(const ContactData& cd, const ContactJets& cj, double angle = 0.0, int* seed_axis = nullptr);

FramePoint frame_point(const ContactData& cd, const Vec3d& p, double angle = 0.0);

/// d alpha of brackets with X: a = dα([e,X],Je), b = dα([e,X],e), c = dα([Je,X],Je), d = dα([Je,X],e).
struct StructureFunctions {
  Jet a, b, c, d;
};

/// From frame jets of order K + 1; the result has order K.
StructureFunctions structure_functions(const FrameJets& f);

/// Lie derivative of the endomorphism field J along X, from jets of order >= 1.
JetMat lie_derivative_J(const JetMat& J, const JetVec& x);

/// Lie derivative of the metric along X, from jets of order >= 1.
JetMat lie_derivative_g(const JetMat& g, const JetVec& x);

/// J = [Je, -e, 0] [e, Je, X]^{-1}.
template <class T>
Mat3<T> complex_structure(const Vec3<T>& e, const Vec3<T>& je, const Vec3<T>& x) {
  const Vec3<T> zero{T(0.0), T(0.0), T(0.0)};
  const Vec3<T> me{-e[0], -e[1], -e[2]};
  return matmul(from_columns(je, me, zero), inverse(from_columns(e, je, x)));
}

}  // namespace rr::contact
