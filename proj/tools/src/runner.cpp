#include "rr/app/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "rr/chart/expression.hpp"
#include "rr/contact/metric.hpp"
#include "rr/curvature/curvature.hpp"
#include "rr/errors.hpp"
#include "rr/metric/metric_space.hpp"

namespace rr::app {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"verify", "realize-local", "realize-global", "distance"};
  return names;
}

namespace {

struct Rung {
  std::string name;
  double identity;        // closed form against oracle, structural identities
  double strict;          // quantities that vanish identically (H, L_X J on K-contact models)
  double discretization;  // RK4, Richardson and realization residuals
  double bound = 1e-6;    // slack on Ricci <= theta'^2 / 2
};

Rung rung_for(const RunConfig& cfg) {
  Rung r = cfg.backend == chart::Backend::Analytic
               ? Rung{"analytic", curvature::kIdentityTol, 1e-8, curvature::kDiscretizationTol}
               : Rung{"finite_difference", curvature::kDiscretizationTol, curvature::kDiscretizationTol,
                      curvature::kDiscretizationTol, curvature::kDiscretizationTol};
  if (cfg.tolerance) r.identity = *cfg.tolerance;
  return r;
}

struct Check {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

class Report {
 public:
  void check(const std::string& name, double worst, double tol) {
    checks_.push_back({name, worst, tol, std::isfinite(worst) && worst <= tol});
  }
  void require(const std::string& name, bool ok) { checks_.push_back({name, ok ? 0.0 : 1.0, 0.0, ok}); }
  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
  }
  ordered_json json() const {
    ordered_json a = ordered_json::array();
    for (const auto& c : checks_) {
      a.push_back({{"name", c.name}, {"worst", c.worst}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    }
    return a;
  }
  ordered_json results = ordered_json::object();

 private:
  std::vector<Check> checks_;
};

// Rethrows library errors with the module name prefixed, keeping the error type.
template <class F>
auto in_module(const char* module, F&& f) -> decltype(f()) {
  const std::string prefix = std::string(module) + ": ";
  try {
    return f();
  } catch (const AdmissibilityError& e) {
    throw AdmissibilityError(prefix + e.what(), e.point(), e.value(), e.ceiling());
  } catch (const InvalidInput& e) {
    throw InvalidInput(prefix + e.what());
  } catch (const ComputationError& e) {
    throw ComputationError(prefix + e.what());
  }
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw InvalidInput("cannot write " + path.string());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  template <class... T>
  void row(const T&... v) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << v), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

contact::ContactData build_model(const RunConfig& cfg) {
  return in_module("contact_core", [&] {
    contact::ContactData cd = contact::model_manifold(cfg.model, cfg.params).with_backend(cfg.backend);
    if (cfg.fd_step) cd.fd.step = *cfg.fd_step;
    return cd;
  });
}

chart::ScalarField prescribed(const RunConfig& cfg, const char* command) {
  if (cfg.f.empty()) throw InvalidInput(std::string("config.f is required for ") + command);
  return in_module("chart_calculus", [&] { return chart::parse_expression(cfg.f); });
}

void write_curvature_grid(const fs::path& path, const curvature::CurvatureSweep& sweep) {
  CsvWriter w(path, {"x", "y", "z", "P", "Q", "ricci_closed", "ricci_oracle", "k_e", "k_je", "G", "H",
                     "ricci_residual", "gauss_residual", "bound_excess", "reeb_derivative_residual",
                     "geodesic_residual", "divergence", "compatibility_residual"});
  for (const auto& r : sweep.reports) {
    w.row(r.point[0], r.point[1], r.point[2], r.P, r.Q, r.ricci_closed, r.ricci_oracle, r.k_e, r.k_je, r.G, r.H,
          r.ricci_residual, r.gauss_residual, r.bound_excess, r.reeb_derivative_residual, r.geodesic_residual,
          r.divergence, r.compatibility_residual);
  }
}

void sweep_checks(Report& rep, const curvature::CurvatureSweep& s, const Rung& rung) {
  rep.check("ricci_closed_vs_oracle", s.worst_ricci, rung.identity);
  rep.check("ricci_upper_bound", s.worst_bound, rung.bound);
  rep.check("ricci_equals_2G", s.worst_gauss, rung.identity);
  rep.check("mean_curvature_zero", s.worst_H, rung.strict);
  rep.check("reeb_derivative_closed_form", s.worst_reeb_derivative, rung.identity);
  rep.check("reeb_geodesic", s.worst_geodesic, rung.identity);
  rep.check("metric_compatibility", s.worst_compatibility, rung.identity);
  rep.require("skipped_points_at_most_1pct", s.skipped_ok());
  rep.results["curvature_points"] = s.reports.size();
  rep.results["curvature_skipped"] = s.skipped;
}

Vec3d random_interior_point(const chart::ChartDomain& dom, std::mt19937_64& rng, double z_fraction = 1.0) {
  Vec3d p{};
  for (int a = 0; a < 3; ++a) {
    const auto iv = dom.sampled_interval(a);
    const double hi = a == 2 ? iv.lo + z_fraction * iv.length() : iv.hi;
    const double pad = 0.05 * (hi - iv.lo);
    p[static_cast<std::size_t>(a)] = std::uniform_real_distribution<double>(iv.lo + pad, hi - pad)(rng);
  }
  return p;
}

void run_verify(const RunConfig& cfg, const fs::path& out, Report& rep, std::vector<fs::path>& files,
                const contact::ContactData& cd) {
  const Rung rung = rung_for(cfg);
  const auto v = in_module("contact_core", [&] { return contact::validate(cd); });
  const double worst_invariant =
      std::max({v.alpha_reeb_residual, v.kernel_residual, v.section_residual, v.rotation_residual,
                v.complex_residual, v.symmetry_residual, v.volume_residual, v.unit_reeb_residual});
  rep.check("contact_invariants", worst_invariant, rung.identity);
  rep.require("metric_positive_definite", v.min_eigenvalue > 0.0);

  const auto points = cd.domain.sample_points();
  const auto sweep = in_module("curvature_engine", [&] { return curvature::sweep_curvature(cd, points); });
  write_curvature_grid(out / "curvature_grid.csv", sweep);
  files.push_back(out / "curvature_grid.csv");
  sweep_checks(rep, sweep, rung);

  double pmin = INFINITY, pmax = -INFINITY, qmin = INFINITY, qmax = -INFINITY, rmin = INFINITY, rmax = -INFINITY;
  for (const auto& r : sweep.reports) {
    pmin = std::fmin(pmin, r.P);
    pmax = std::fmax(pmax, r.P);
    qmin = std::fmin(qmin, r.Q);
    qmax = std::fmax(qmax, r.Q);
    rmin = std::fmin(rmin, r.ricci_oracle);
    rmax = std::fmax(rmax, r.ricci_oracle);
  }
  rep.results["theta_prime"] = cd.theta_prime;
  rep.results["ceiling"] = 0.5 * cd.theta_prime * cd.theta_prime;
  rep.results["P_range"] = {pmin, pmax};
  rep.results["Q_range"] = {qmin, qmax};
  rep.results["ricci_oracle_range"] = {rmin, rmax};

  // Equivalence of the four K-contact conditions at every grid point.
  std::size_t agree = 0, non_max = 0, four_zeros = 0;
  in_module("curvature_engine", [&] {
    for (const auto& p : points) {
      const auto e = curvature::max_ricci_equivalence(cd, p, rung.identity);
      if (e.agree()) ++agree;
      if (!e.ricci_max) {
        ++non_max;
        if (e.zero_directions == 4) ++four_zeros;
      }
    }
  });
  rep.check("equivalence_disagreement_fraction",
            points.empty() ? 0.0 : 1.0 - static_cast<double>(agree) / static_cast<double>(points.size()), 0.0);
  rep.check("four_zero_directions_miss_fraction",
            non_max == 0 ? 0.0 : 1.0 - static_cast<double>(four_zeros) / static_cast<double>(non_max), 0.0);
  rep.results["non_max_points"] = non_max;

  // Closed form against oracle on seeded random complex-structure perturbations.
  std::mt19937_64 rng(cfg.seed);
  double worst_pert = 0.0, worst_pert_bound = 0.0;
  in_module("realization", [&] {
    for (int k = 0; k < cfg.verify.random_perturbations; ++k) {
      const std::uint64_t s = rng();
      const realization::PerturbationField pf{0.6 * contact::random_smooth_field(s, cd.domain),
                                              exp(0.4 * contact::random_smooth_field(s + 1, cd.domain))};
      const auto pcd = contact::with_section_perturbation(cd, pf.lambda, pf.eta);
      const Vec3d p = random_interior_point(cd.domain, rng);
      const double closed = realization::ricci_perturbed_closed_form(cd, pf, p).ricci;
      const double oracle = curvature::ricci_reeb_oracle(pcd, p);
      worst_pert = std::fmax(worst_pert, std::fabs(closed - oracle) / std::fmax(1.0, std::fabs(oracle)));
      worst_pert_bound = std::fmax(worst_pert_bound, oracle - 0.5 * cd.theta_prime * cd.theta_prime);
    }
  });
  rep.check("perturbed_closed_vs_oracle", worst_pert, rung.identity);
  rep.check("perturbed_ricci_upper_bound", std::fmax(worst_pert_bound, 0.0), rung.bound);
  rep.results["random_perturbations"] = cfg.verify.random_perturbations;

  // Jacobi fields along Reeb flowlines.
  double worst_sectional = 0.0, worst_area = 0.0, worst_jacobi = 0.0;
  in_module("curvature_engine", [&] {
    const double T = cfg.verify.jacobi_time;
    const int steps = std::max(1, static_cast<int>(std::lround(std::fabs(T) / cfg.verify.jacobi_step)));
    const contact::MetricField g = contact::compatible_metric(cd);
    const double z_fraction = cd.domain.periodic()[2] ? 1.0 : 0.5;
    for (int k = 0; k < cfg.verify.jacobi_points; ++k) {
      const Vec3d p = random_interior_point(cd.domain, rng, z_fraction);
      const auto fp = contact::frame_point(cd, p);
      const double via = curvature::sectional_via_jacobi(cd, p, fp.e);
      const double oracle = curvature::sectional_oracle(g, p, fp.e, fp.x);
      worst_sectional = std::fmax(worst_sectional, std::fabs(via - oracle));
      const auto path = curvature::alpha_jacobi_propagate(cd, p, fp.e, T, steps);
      worst_area = std::fmax(worst_area, path.area_drift());
      worst_jacobi = std::fmax(worst_jacobi, curvature::jacobi_equation_residual(cd, path));
    }
  });
  rep.check("sectional_via_jacobi", worst_sectional, rung.discretization);
  rep.check("jacobi_area_drift", worst_area, cfg.backend == chart::Backend::Analytic ? 1e-6 : rung.discretization);
  rep.check("jacobi_equation_residual", worst_jacobi, rung.discretization);
}

realization::FlowBox default_box(const contact::ContactData& cd) {
  realization::FlowBox b;
  b.x = cd.domain.sampled_interval(0);
  b.y = cd.domain.sampled_interval(1);
  const auto z = cd.domain.bounds()[2];
  b.z0 = z.lo <= 0.0 && 0.0 < z.hi ? 0.0 : z.lo;
  b.T = std::fmin(1.0, z.hi - b.z0);
  return b;
}

void run_realize_local(const RunConfig& cfg, const fs::path& out, Report& rep, std::vector<fs::path>& files,
                       const contact::ContactData& cd) {
  const Rung rung = rung_for(cfg);
  const auto f = prescribed(cfg, "realize-local");
  const auto box = cfg.flow_box.value_or(default_box(cd));
  const auto sol = in_module("realization", [&] { return realization::local_realize(cd, f, box, cfg.local); });
  {
    CsvWriter w(out / "realization.csv", {"x", "y", "z", "eta", "mu", "f", "ricci", "residual"});
    for (const auto& s : sol.samples) w.row(s.point[0], s.point[1], s.point[2], s.eta, s.mu, s.f, s.ricci, s.residual);
    files.push_back(out / "realization.csv");
  }
  std::vector<Vec3d> pts;
  for (const auto& s : sol.samples) pts.push_back(s.point);
  const auto sweep = in_module("curvature_engine", [&] { return curvature::sweep_curvature(sol.realized, pts); });
  write_curvature_grid(out / "curvature_grid.csv", sweep);
  files.push_back(out / "curvature_grid.csv");

  rep.check("realization_residual", sol.residual_sup, rung.discretization);
  rep.check("boundary_agreement", sol.boundary_residual, 1e-12);
  rep.check("realized_ricci_upper_bound", sol.max_ricci_excess, rung.bound);
  sweep_checks(rep, sweep, rung);
  rep.results["flow_box"] = {{"x", {box.x.lo, box.x.hi}},
                             {"y", {box.y.lo, box.y.hi}},
                             {"z0", box.z0},
                             {"T", box.T},
                             {"seeds", box.seeds},
                             {"time_samples", box.time_samples}};
  rep.results["step"] = sol.step;
  rep.results["residual_sup"] = sol.residual_sup;
  rep.results["ceiling"] = sol.ceiling;
  rep.results["clamp_events"] = sol.clamp_events;
}

void run_realize_global(const RunConfig& cfg, const fs::path& out, Report& rep, std::vector<fs::path>& files,
                        const contact::ContactData& cd) {
  const Rung rung = rung_for(cfg);
  const auto f = prescribed(cfg, "realize-global");
  const auto res = in_module("realization", [&] { return realization::almost_global_realize(cd, f, cfg.global); });
  const auto conv =
      in_module("metric_space", [&] { return metric::convergence_report(res.sequence, res.limit); });

  double worst_res = 0.0, worst_excess = 0.0;
  {
    CsvWriter w(out / "realization.csv", {"n", "epsilon", "delta", "band_volume", "residual_outside_band",
                                          "max_ricci_excess", "volume", "min_eigenvalue"});
    for (const auto& el : res.elements) {
      w.row(el.n, el.epsilon, el.delta, el.band_volume, el.residual_outside_band, el.max_ricci_excess, el.volume,
            el.min_eigenvalue);
      worst_res = std::fmax(worst_res, el.residual_outside_band);
      worst_excess = std::fmax(worst_excess, el.max_ricci_excess);
    }
    files.push_back(out / "realization.csv");
  }
  {
    CsvWriter w(out / "distances.csv", {"n", "epsilon_n", "epsilon_n1", "d_bar", "partial_sum"});
    for (std::size_t k = 0; k < conv.distance_bounds.size(); ++k) {
      w.row(k, res.elements[k].epsilon, res.elements[k + 1].epsilon, conv.distance_bounds[k], conv.partial_sums[k]);
    }
    files.push_back(out / "distances.csv");
  }
  // Curvature of the last element on a coarse grid across the whole period, band included.
  std::vector<Vec3d> pts;
  const auto xi = cd.domain.sampled_interval(0), yi = cd.domain.sampled_interval(1);
  const auto ti = cd.domain.bounds()[2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 16; ++k) {
        pts.push_back({xi.lo + (i + 0.5) * xi.length() / 3, yi.lo + (j + 0.5) * yi.length() / 3,
                       ti.lo + (k + 0.5) * ti.length() / 16});
      }
  const auto sweep =
      in_module("curvature_engine", [&] { return curvature::sweep_curvature(res.elements.back().structure, pts); });
  write_curvature_grid(out / "curvature_grid.csv", sweep);
  files.push_back(out / "curvature_grid.csv");

  const bool distances_vanish = conv.distance_bounds.empty() ||
                                *std::max_element(conv.distance_bounds.begin(), conv.distance_bounds.end()) <= 1e-14;
  ordered_json cj;
  cj["distance_label"] = "d_bar >= d: straight-path upper bounds";
  cj["distance_bounds"] = conv.distance_bounds;
  cj["partial_sums"] = conv.partial_sums;
  cj["tail_fit"] = {{"slope", conv.tail_fit.slope}, {"intercept", conv.tail_fit.intercept}, {"r2", conv.tail_fit.r2}};
  cj["tail_ratio"] = conv.tail_ratio;
  cj["tail_estimate"] = conv.tail_estimate;
  cj["sqrt_eps_fit"] = {{"slope", conv.sqrt_eps_fit.slope},
                        {"intercept", conv.sqrt_eps_fit.intercept},
                        {"r2", conv.sqrt_eps_fit.r2},
                        {"applicable", !distances_vanish}};
  cj["deflated_set"] = {{"sequence_volume", conv.deflated_volume},
                        {"sequence_points", conv.deflated_points},
                        {"limit_volume", conv.limit_deflated_volume},
                        {"limit_points", conv.limit_deflated_points},
                        {"limit_descriptor", res.limit.descriptor},
                        {"symmetric_difference", conv.symmetric_difference},
                        {"layer_volume", res.sequence.layer_volume}};
  cj["deviation_measure"] = conv.deviation_measure;
  cj["conditions"] = {{"summable", conv.summable}, {"nullset", conv.nullset}, {"pointwise", conv.pointwise}};
  cj["verdict"] = conv.verdict();
  {
    std::ofstream o(out / "convergence.json");
    if (!o) throw InvalidInput("cannot write convergence.json");
    o << cj.dump(2) << '\n';
    files.push_back(out / "convergence.json");
  }

  rep.check("residual_outside_band", worst_res, rung.discretization);
  rep.check("ricci_upper_bound_all_elements", worst_excess, rung.bound);
  rep.check("volume_drift", res.max_volume_drift, 1e-6);
  sweep_checks(rep, sweep, rung);
  rep.require("condition_summable", conv.summable);
  rep.require("condition_nullset", conv.nullset);
  rep.require("condition_pointwise", conv.pointwise);
  if (!distances_vanish) rep.check("sqrt_eps_fit_r2_shortfall", 1.0 - conv.sqrt_eps_fit.r2, 0.01);
  rep.check("deflated_set_outside_sigma0_band", conv.deflated_volume, res.sequence.layer_volume);
  rep.results["elements"] = res.elements.size();
  rep.results["reference_volume"] = res.reference_volume;
  rep.results["max_volume_drift"] = res.max_volume_drift;
  rep.results["tail_estimate"] = conv.tail_estimate;
  rep.results["clamp_events"] = res.local.clamp_events;
  rep.results["realization_notes"] = res.notes;
}

void run_distance(const RunConfig& cfg, const fs::path& out, Report& rep, std::vector<fs::path>& files,
                  const contact::ContactData& cd) {
  const auto& ms = cfg.distance.metrics;
  if (ms.size() < 2) throw InvalidInput("distance.metrics: need at least two metric definitions");
  const auto q = cd.domain.quadrature();
  std::vector<metric::SampledTensor> gs;
  ordered_json vols = ordered_json::object();
  for (const auto& m : ms) {
    const auto pf = in_module("chart_calculus", [&] {
      return realization::PerturbationField{chart::parse_expression(m.lambda), chart::parse_expression(m.eta)};
    });
    const auto pcd = in_module("realization", [&] { return realization::perturb_complex_structure(cd, pf); });
    gs.push_back(metric::sample(contact::compatible_metric(pcd), q));
    vols[m.label] = metric::volume(gs.back(), q);
  }
  CsvWriter w(out / "distances.csv", {"i", "j", "label_i", "label_j", "d_bar", "clarke_bound", "ratio"});
  double c_hat = 0.0, worst_asym = 0.0;
  in_module("metric_space", [&] {
    for (std::size_t i = 0; i < gs.size(); ++i)
      for (std::size_t j = i + 1; j < gs.size(); ++j) {
        const double d = metric::path_length_upper(gs[i], gs[j], q, cfg.distance.path_steps);
        const double back = metric::path_length_upper(gs[j], gs[i], q, cfg.distance.path_steps);
        const double b = metric::clarke_bound(gs[i], gs[j], q).bound;
        const double ratio = b > 0.0 ? d / b : 0.0;
        c_hat = std::fmax(c_hat, ratio);
        worst_asym = std::fmax(worst_asym, std::fabs(d - back));
        w.row(i, j, ms[i].label, ms[j].label, d, b, ratio);
      }
  });
  files.push_back(out / "distances.csv");
  rep.check("d_bar_symmetry", worst_asym, 1e-12);
  rep.results["distance_label"] = "d_bar >= d: straight-path upper bounds";
  rep.results["volumes"] = vols;
  rep.results["c_hat"] = c_hat;
  rep.results["path_steps"] = cfg.distance.path_steps;
}

}  // namespace

RunOutcome run(const std::string& command, const RunConfig& cfg, const fs::path& out) {
  RunOutcome outcome;
  const Rung rung = rung_for(cfg);
  Report rep;
  std::string status = "ok";
  ordered_json notes = ordered_json::array();

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    outcome.exit_code = kExitInvalidInput;
    outcome.error = "cannot create output directory " + out.string() + ": " + ec.message();
    return outcome;
  }
  try {
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
      throw InvalidInput("unknown command '" + command + "'");
    }
    const contact::ContactData cd = build_model(cfg);
    for (const auto& n : cd.notes) notes.push_back(n);
    if (command == "verify") {
      run_verify(cfg, out, rep, outcome.files, cd);
    } else if (command == "realize-local") {
      run_realize_local(cfg, out, rep, outcome.files, cd);
    } else if (command == "realize-global") {
      run_realize_global(cfg, out, rep, outcome.files, cd);
    } else {
      run_distance(cfg, out, rep, outcome.files, cd);
    }
    if (!rep.passed()) {
      status = "check_failed";
      outcome.exit_code = kExitCheckFailed;
    }
  } catch (const InvalidInput& e) {
    status = "invalid_input";
    outcome.exit_code = kExitInvalidInput;
    outcome.error = e.what();
  } catch (const ComputationError& e) {
    status = "computation_error";
    outcome.exit_code = kExitCheckFailed;
    outcome.error = e.what();
  }

  ordered_json s;
  s["command"] = command;
  s["model"] = cfg.model;
  s["backend"] = chart::backend_name(cfg.backend);
  s["tolerance_rung"] = {{"name", rung.name},
                         {"identity", rung.identity},
                         {"strict", rung.strict},
                         {"discretization", rung.discretization},
                         {"bound", rung.bound}};
  s["seed"] = cfg.seed;
  s["status"] = status;
  s["exit_code"] = outcome.exit_code;
  if (!outcome.error.empty()) s["error"] = outcome.error;
  s["checks"] = rep.json();
  s["results"] = rep.results;
  s["notes"] = notes;
  ordered_json fl = ordered_json::array();
  for (const auto& f : outcome.files) fl.push_back(f.filename().string());
  s["files"] = fl;
  s["timestamp"] = timestamp_utc();
  std::ofstream o(out / "summary.json");
  if (!o) {
    outcome.exit_code = kExitInvalidInput;
    outcome.error = "cannot write summary.json in " + out.string();
    return outcome;
  }
  o << s.dump(2) << '\n';
  outcome.files.push_back(out / "summary.json");
  return outcome;
}

}  // namespace rr::app
