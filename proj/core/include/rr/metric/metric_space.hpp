#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rr/chart/domain.hpp"
#include "rr/contact/contact.hpp"
#include "rr/contact/metric.hpp"
#include "rr/tensor.hpp"

namespace rr::metric {

using chart::Quadrature;
using contact::MetricField;

/// Symmetric tensor field sampled at the points of a quadrature.
struct SampledTensor {
  std::vector<Mat3d> values;
};

SampledTensor sample(const MetricField& g, const Quadrature& q);

/// (h, k) = sum_i w_i tr(g^-1 h g^-1 k) sqrt(det g). Throws InvalidInput where g is not SPD.
double l2_inner(const SampledTensor& g, const SampledTensor& h, const SampledTensor& k, const Quadrature& q);
double l2_inner(const MetricField& g, const MetricField& h, const MetricField& k, const Quadrature& q);

/// Integral of sqrt(det g).
double volume(const SampledTensor& g, const Quadrature& q);
double volume(const MetricField& g, const Quadrature& q);
/// Integral of (1/theta') times the alpha ^ d alpha coefficient.
double contact_volume(const contact::ContactData& cd, const Quadrature& q);

/// Length of the straight segment g_t = (1 - t) g0 + t g1 under the L2 metric, by the midpoint
/// rule with `steps` nodes in t. An upper bound for the distance (labelled d-bar).
/// Throws InvalidInput if the segment leaves the SPD cone at a sampled t.
double path_length_upper(const SampledTensor& g0, const SampledTensor& g1, const Quadrature& q, int steps = 16);
double path_length_upper(const MetricField& g0, const MetricField& g1, const Quadrature& q, int steps = 16);

/// Componentwise relative equality tolerance for the difference set.
inline constexpr double kEqualityTol = 1e-10;
/// Relative determinant threshold of the deflated-set test.
inline constexpr double kDeflationTol = 1e-8;

struct ClarkeBound {
  double bound = 0.0;  // sqrt(Vol(D, g0)) + sqrt(Vol(D, g1))
  double volume0 = 0.0;
  double volume1 = 0.0;
  std::size_t difference_points = 0;
};

/// Volumes of the set where g0 and g1 differ, under both metrics.
ClarkeBound clarke_bound(const SampledTensor& g0, const SampledTensor& g1, const Quadrature& q,
                         double eq_tol = kEqualityTol);
ClarkeBound clarke_bound(const MetricField& g0, const MetricField& g1, const Quadrature& q,
                         double eq_tol = kEqualityTol);

/// True where the two matrices differ beyond eq_tol relative to the larger entry magnitude.
bool differs(const Mat3d& a, const Mat3d& b, double eq_tol = kEqualityTol);

struct Calibration {
  double c_hat = 0.0;  // max path_length_upper / clarke bound
  std::vector<double> ratios;
};

/// Empirical constant over pairs that differ somewhere (pairs with a zero bound are skipped).
Calibration calibrate_constant(const std::vector<std::pair<SampledTensor, SampledTensor>>& pairs, const Quadrature& q,
                               int steps = 16);

/// A symmetric form allowed to degenerate on a subset.
struct SemiMetricField {
  MetricField g;
  /// Marks the analytically known singular set (may be empty).
  std::function<bool(const Vec3d&)> singular;
  std::string descriptor;
};

/// Ordered metrics with a common quadrature and reference metric.
struct MetricSequence {
  std::vector<MetricField> metrics;
  std::vector<double> epsilons;  // schedule, empty when not applicable
  MetricField reference;
  Quadrature quadrature;
  /// Volume of one layer of grid cells; the nullset comparison allows this much.
  double layer_volume = 0.0;
  int path_steps = 8;
};

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares y = slope x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceReport {
  std::vector<double> distance_bounds;  // d-bar(g_k, g_k+1)
  std::vector<double> partial_sums;
  LinearFit tail_fit;                   // log d-bar_k against k
  double tail_ratio = 0.0;              // exp(slope)
  double tail_estimate = 0.0;           // partial sum plus geometric tail
  LinearFit sqrt_eps_fit;               // log d-bar_k against log sqrt(eps_k), when epsilons are set
  double deflated_volume = 0.0;         // volume of D of the sequence
  std::size_t deflated_points = 0;
  double limit_deflated_volume = 0.0;   // volume of X of g_inf on the grid
  std::size_t limit_deflated_points = 0;
  double symmetric_difference = 0.0;
  /// Integral of min(1, |g_k - g_inf| / |g_inf|) outside both deflated sets, per k.
  std::vector<double> deviation_measure;
  bool summable = false;
  bool nullset = false;
  bool pointwise = false;
  bool verdict() const { return summable && nullset && pointwise; }
};

ConvergenceReport convergence_report(const MetricSequence& seq, const SemiMetricField& g_inf);

}  // namespace rr::metric
