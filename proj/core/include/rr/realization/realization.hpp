#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rr/chart/domain.hpp"
#include "rr/chart/field.hpp"
#include "rr/contact/contact.hpp"
#include "rr/metric/metric_space.hpp"

namespace rr::realization {

using chart::Interval;
using chart::ScalarField;
using contact::ContactData;

/// The pair (lambda, eta) of the perturbation e -> eta^2 Je + lambda e.
struct PerturbationField {
  ScalarField lambda{0.0};
  ScalarField eta{1.0};
  ScalarField mu() const { return lambda / (eta * eta); }
};

/// J_*(e) = eta^2 Je + lambda e, J_*(Je) = -((1 + lambda^2) / eta^2) e - lambda Je.
///
/// Throws InvalidInput if eta <= 0 at a grid point or the new metric is not SPD.
ContactData perturb_complex_structure(const ContactData& cd, const PerturbationField& p);

struct PerturbedRicci {
  double P_total = 0.0;  // P_* + X(eta) / eta
  double Q_total = 0.0;  // Q_* - lambda / (2 eta) X(eta) + eta / 2 X(lambda / eta)
  double ricci = 0.0;    // -2 P_total^2 + theta'^2 / 2 - 2 Q_total^2
};

/// Ricci(X) of the perturbed structure from the base section's brackets and the X-derivatives
/// of lambda and eta.
PerturbedRicci ricci_perturbed_closed_form(const ContactData& cd, const PerturbationField& p, const Vec3d& point);

struct SweepOptions {
  double initial_bracket = 0.5;
  double bracket_limit = 512.0;
  int samples_per_side = 64;  // lambda samples on each side of 0 per bracket
  bool verify_with_oracle = true;
};

struct SweepResult {
  double lambda = 0.0;
  double max_closed = 0.0;  // max over the grid of Ricci_lambda from the closed form
  double max_oracle = 0.0;  // same from the Levi-Civita oracle (when verified)
  double bracket = 0.0;     // bracket half-width where lambda was found
  std::size_t points = 0;
};

/// Finds a constant lambda (eta = 1) with max over the grid of Ricci_lambda < c.
///
/// Throws InvalidInput if c > theta'^2 / 2 or Ricci = theta'^2 / 2 at every grid point, and
/// ComputationError naming the blocking points when the bracket limit is reached.
SweepResult sweep_lower_ricci(const ContactData& cd, double c, const SweepOptions& opts = {});

/// Sigma_0 x [z0, z0 + T] in chart coordinates; the Reeb field must be d_z there.
struct FlowBox {
  Interval x{-0.5, 0.5};
  Interval y{-0.5, 0.5};
  double z0 = 0.0;
  double T = 1.0;
  std::array<int, 2> seeds{6, 6};  // Sigma_0 sample grid (cell midpoints)
  int time_samples = 8;            // sample times per flowline for the residual (cell midpoints)
};

struct RealizeOptions {
  double step = 1e-3;
  /// f must stay below theta'^2 / 2 - clamp_floor * theta'^2; inside that band the root is clamped.
  double clamp_floor = 1e-6;
  /// Residual and bound checks on the sample grid (each sample costs an oracle evaluation).
  bool verify = true;
};

struct RealizationSample {
  Vec3d point{};
  double eta = 1.0, mu = 0.0;
  double f = 0.0;
  double ricci = 0.0;  // oracle Ricci(X) of g_*
  double residual = 0.0;
};

struct RealizationSolution {
  FlowBox box;
  double step = 0.0;
  ScalarField ell;  // ln eta
  ScalarField mu;   // lambda / eta^2
  PerturbationField perturbation;
  ContactData realized;
  std::vector<RealizationSample> samples;
  double residual_sup = 0.0;       // max |Ricci_* - f| over the samples
  double boundary_residual = 0.0;  // max |g_* - g| on Sigma_0
  double max_ricci_excess = 0.0;   // max(0, Ricci_* - theta'^2 / 2)
  double ceiling = 0.0;            // theta'^2 / 2
  std::size_t clamp_events = 0;    // right-hand side evaluations inside the clamp band
};

/// Integrates the (ln eta, mu) system along every flowline from Sigma_0 with RK4.
///
/// The solution is exposed as Taylor sources: each flowline is integrated once, carrying
/// jets in the Sigma_0 directions; jets along the flow come from a final RK4 step whose
/// length is itself a jet. Throws AdmissibilityError where f exceeds theta'^2 / 2.
RealizationSolution local_realize(const ContactData& cd, const ScalarField& f, const FlowBox& box,
                                  const RealizeOptions& opts = {});

/// 6 s^5 - 15 s^4 + 10 s^3 on s = (tau - (period - delta)) / delta, 0 before and 1 after.
ScalarField smoothstep_band(double period, double delta);

struct GlobalOptions {
  double epsilon = 0.1;
  int n_max = 6;
  double step = 1e-3;
  std::array<int, 2> seeds{6, 6};
  int tau_cells = 16;   // uniform cells outside the bands
  int band_cells = 8;   // cells per band annulus
  int residual_tau_samples = 6;
  int path_steps = 8;
  double clamp_floor = 1e-6;
};

struct SequenceElement {
  int n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double band_volume = 0.0;
  ContactData structure;
  double residual_outside_band = 0.0;
  double max_ricci_excess = 0.0;
  double volume = 0.0;
  double min_eigenvalue = 0.0;  // smallest eigenvalue of g_n over the band samples
};

struct AlmostGlobalResult {
  RealizationSolution local;
  std::vector<SequenceElement> elements;
  metric::MetricSequence sequence;
  metric::SemiMetricField limit;
  double reference_volume = 0.0;
  double max_volume_drift = 0.0;
  double band_volume_per_delta = 0.0;
  std::vector<std::string> notes;
};

/// Solves on Sigma_0 x [0, period) of mapping_torus_box, then closes each g_{eps_n} by
/// interpolating back to the original structure on the band {period - delta_n <= tau <= period}.
AlmostGlobalResult almost_global_realize(const ContactData& cd, const ScalarField& f, const GlobalOptions& opts = {});

}  // namespace rr::realization
