#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rr/chart/field.hpp"
#include "rr/contact/contact.hpp"

namespace rr::contact {

/// Smooth random perturbation (lambda0, eta0) of the base complex structure.
struct BasePerturbation {
  double lambda_amplitude = 0.0;
  double eta_amplitude = 0.0;  // eta0 = exp(eta_amplitude * R), |R| <= 1
  std::uint64_t seed = 0;
  bool active() const { return lambda_amplitude != 0.0 || eta_amplitude != 0.0; }
};

struct ModelParams {
  std::optional<double> theta_prime;  // heisenberg_r3 only
  int n = 1;                          // torus_xi_n
  double L = 1.0;                     // mapping_torus_box base square side
  double period = 1.0;                // mapping_torus_box fiber period
  std::array<chart::Interval, 3> box{chart::Interval{-1, 1}, chart::Interval{-1, 1}, chart::Interval{-1, 1}};
  int twist = 0;  // mapping_torus_box: section rotated by 2 pi twist tau / period inside ker(alpha)
  BasePerturbation base_perturbation;
  std::array<int, 3> grid{16, 16, 16};
  double margin = 0.0;
};

const std::vector<std::string>& model_names();

/// Builds and validates one of heisenberg_r3, torus_xi_n, mapping_torus_box.
ContactData model_manifold(const std::string& name, const ModelParams& params = {});

/// Replaces the section by e/eta and its J-image by eta Je + (lambda/eta) e, i.e.
/// the complex structure e -> eta^2 Je + lambda e.
ContactData with_section_perturbation(const ContactData& cd, const chart::ScalarField& lambda,
                                      const chart::ScalarField& eta);

/// Smooth field built from three random Fourier modes; periodic in every periodic axis of `dom`.
/// Values lie in [-1, 1].
chart::ScalarField random_smooth_field(std::uint64_t seed, const chart::ChartDomain& dom);

}  // namespace rr::contact
