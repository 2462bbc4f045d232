#include "rr/contact/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rr/errors.hpp"

namespace rr::contact {

using chart::ScalarField;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"heisenberg_r3", "torus_xi_n", "mapping_torus_box"};
  return names;
}

ContactData with_section_perturbation(const ContactData& cd, const ScalarField& lambda, const ScalarField& eta) {
  ContactData r = cd;
  const ScalarField inv = ScalarField(1.0) / eta;
  const ScalarField mix = lambda / eta;
  for (std::size_t i = 0; i < 3; ++i) {
    r.e[i] = cd.e[i] * inv;
    r.je[i] = eta * cd.je[i] + mix * cd.e[i];
  }
  return r;
}

ScalarField random_smooth_field(std::uint64_t seed, const chart::ChartDomain& dom) {
  std::mt19937_64 rng(seed);
  // Map raw draws ourselves so the field does not depend on the library's distributions.
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto mode = [&]() { return static_cast<int>(rng() % 5) - 2; };
  const ScalarField x = ScalarField::coordinate(0), y = ScalarField::coordinate(1), z = ScalarField::coordinate(2);
  const std::array<ScalarField, 3> coord{x, y, z};
  ScalarField sum(0.0);
  for (int k = 0; k < 3; ++k) {
    ScalarField phase(kTwoPi * unit());
    for (std::size_t a = 0; a < 3; ++a) {
      const auto& b = dom.bounds()[a];
      int m = mode();
      if (a == 2 && m == 0) m = 1;  // every mode varies along the third axis
      // Integer wavenumbers keep the field periodic on periodic axes.
      const double freq = kTwoPi * m / b.length();
      if (m != 0) phase = phase + freq * (coord[a] - b.lo);
    }
    const double c = (2.0 * unit() - 1.0) / 3.0;
    sum = sum + c * sin(phase);
  }
  return sum;
}

namespace {

ContactData heisenberg(const ModelParams& p) {
  const double theta = p.theta_prime.value_or(2.0);
  if (!(theta > 0.0)) throw InvalidInput("heisenberg_r3: theta_prime must be positive");
  ContactData cd;
  cd.name = "heisenberg_r3";
  const ScalarField y = ScalarField::coordinate(1);
  cd.alpha = {-y, ScalarField(0.0), ScalarField(1.0)};
  cd.theta_prime = theta;
  const double s = std::sqrt(theta);
  cd.e = {ScalarField(s), ScalarField(0.0), s * y};
  cd.je = {ScalarField(0.0), ScalarField(s), ScalarField(0.0)};
  cd.domain = chart::ChartDomain(p.box, {false, false, false}, p.grid, p.margin);
  return cd;
}

ContactData torus(const ModelParams& p) {
  if (p.n < 1) throw InvalidInput("torus_xi_n: n must be a positive integer");
  if (p.theta_prime && std::fabs(*p.theta_prime - kTwoPi * p.n) > 1e-12) {
    throw InvalidInput("torus_xi_n: theta_prime is fixed to 2 pi n");
  }
  ContactData cd;
  cd.name = "torus_xi_n";
  const ScalarField arg = (kTwoPi * p.n) * ScalarField::coordinate(2);
  cd.alpha = {cos(arg), -sin(arg), ScalarField(0.0)};
  cd.theta_prime = kTwoPi * p.n;
  cd.e = {sin(arg), cos(arg), ScalarField(0.0)};
  cd.je = {ScalarField(0.0), ScalarField(0.0), ScalarField(1.0)};
  cd.domain = chart::ChartDomain({chart::Interval{0, 1}, chart::Interval{0, 1}, chart::Interval{0, 1}},
                                 {true, true, true}, p.grid, 0.0);
  return cd;
}

ContactData mapping_torus(const ModelParams& p) {
  if (!(p.L > 0.0) || !(p.period > 0.0)) throw InvalidInput("mapping_torus_box: L and period must be positive");
  if (p.theta_prime && std::fabs(*p.theta_prime - 2.0) > 1e-12) {
    throw InvalidInput("mapping_torus_box: theta_prime is fixed to 2");
  }
  ContactData cd;
  cd.name = "mapping_torus_box";
  const ScalarField y = ScalarField::coordinate(1);
  cd.alpha = {-y, ScalarField(0.0), ScalarField(1.0)};
  cd.theta_prime = 2.0;
  const double s = std::sqrt(2.0);
  chart::VectorField e{ScalarField(s), ScalarField(0.0), s * y};
  chart::VectorField je{ScalarField(0.0), ScalarField(s), ScalarField(0.0)};
  if (p.twist != 0) {
    const ScalarField phi = (kTwoPi * p.twist / p.period) * ScalarField::coordinate(2);
    const ScalarField c = cos(phi), sn = sin(phi);
    for (std::size_t i = 0; i < 3; ++i) {
      const ScalarField ei = e[i], ji = je[i];
      e[i] = c * ei + sn * ji;
      je[i] = c * ji - sn * ei;
    }
    cd.notes.push_back("section twisted " + std::to_string(p.twist) + " turn(s) per period");
  }
  cd.e = e;
  cd.je = je;
  const double h = 0.5 * p.L;
  cd.domain = chart::ChartDomain({chart::Interval{-h, h}, chart::Interval{-h, h}, chart::Interval{0, p.period}},
                                 {false, false, true}, p.grid, p.margin);
  cd.notes.push_back("fibered stand-in: pages tau = const, no binding; box margin replaces the binding neighborhood");
  if (p.base_perturbation.active()) {
    const auto& bp = p.base_perturbation;
    const ScalarField eta = exp(bp.eta_amplitude * random_smooth_field(bp.seed, cd.domain));
    const ScalarField lambda = bp.lambda_amplitude * random_smooth_field(bp.seed + 1, cd.domain);
    cd = with_section_perturbation(cd, lambda, eta);
    cd.notes.push_back("base complex structure randomly perturbed (seed " + std::to_string(bp.seed) + ")");
  }
  return cd;
}

}  // namespace

ContactData model_manifold(const std::string& name, const ModelParams& params) {
  ContactData cd;
  if (name == "heisenberg_r3") {
    cd = heisenberg(params);
  } else if (name == "torus_xi_n") {
    cd = torus(params);
  } else if (name == "mapping_torus_box") {
    cd = mapping_torus(params);
  } else {
    throw InvalidInput("unknown model manifold '" + name + "'");
  }
  // Full-resolution validation is the caller's choice; construction checks a capped grid.
  ContactData probe = cd;
  const auto& g = cd.domain.grid();
  probe.domain = cd.domain.with_grid({std::min(g[0], 8), std::min(g[1], 8), std::min(g[2], 8)});
  if (!validate(probe).passed(1e-9)) throw InvalidInput(cd.name + ": model failed validation");
  return cd;
}

}  // namespace rr::contact
