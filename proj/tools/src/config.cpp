#include "rr/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rr/errors.hpp"

namespace rr::app {

using nlohmann::json;

namespace {

// Reads an object key by key and rejects whatever was not consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput(path_ + ": expected an object");
  }
  ~ObjectReader() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw InvalidInput(path_ + ": missing required key '" + key + "'");
    return j_.at(key);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    return as_number(j_.at(key), where(key));
  }
  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    return as_int(j_.at(key), where(key));
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    return as_string(j_.at(key), where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidInput(path_ + ": unknown key '" + it.key() + "'");
    }
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InvalidInput(where + ": expected a number");
    return v.get<double>();
  }
  static int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InvalidInput(where + ": expected an integer");
    return v.get<int>();
  }
  static std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw InvalidInput(where + ": expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

chart::Interval interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw InvalidInput(where + ": expected [lo, hi]");
  const double lo = ObjectReader::as_number(v[0], where), hi = ObjectReader::as_number(v[1], where);
  if (!(lo < hi)) throw InvalidInput(where + ": need lo < hi");
  return {lo, hi};
}

template <std::size_t N>
std::array<int, N> int_array(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != N) throw InvalidInput(where + ": expected " + std::to_string(N) + " integers");
  std::array<int, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = ObjectReader::as_int(v[i], where);
  return r;
}

void parse_params(const json& j, contact::ModelParams& p) {
  ObjectReader r(j, "model.params");
  if (r.has("theta_prime")) p.theta_prime = ObjectReader::as_number(j.at("theta_prime"), r.where("theta_prime"));
  p.n = r.integer("n", p.n);
  p.L = r.number("L", p.L);
  p.period = r.number("period", p.period);
  if (r.has("box")) {
    const json& b = j.at("box");
    if (!b.is_array() || b.size() != 3) throw InvalidInput("model.params.box: expected three intervals");
    for (std::size_t a = 0; a < 3; ++a) p.box[a] = interval(b[a], "model.params.box");
  }
  p.twist = r.integer("twist", p.twist);
  if (r.has("grid")) p.grid = int_array<3>(j.at("grid"), r.where("grid"));
  p.margin = r.number("margin", p.margin);
  if (r.has("base_perturbation")) {
    ObjectReader bp(j.at("base_perturbation"), "model.params.base_perturbation");
    p.base_perturbation.lambda_amplitude = bp.number("lambda_amplitude", 0.0);
    p.base_perturbation.eta_amplitude = bp.number("eta_amplitude", 0.0);
    const int s = bp.integer("seed", 0);
    if (s < 0) throw InvalidInput("model.params.base_perturbation.seed: must be non-negative");
    p.base_perturbation.seed = static_cast<std::uint64_t>(s);
    bp.finish();
  }
  r.finish();
}

realization::FlowBox parse_box(const json& j) {
  ObjectReader r(j, "realize_local.flow_box");
  realization::FlowBox b;
  b.x = interval(r.at("x"), r.where("x"));
  b.y = interval(r.at("y"), r.where("y"));
  b.z0 = r.number("z0", b.z0);
  b.T = r.number("T", b.T);
  if (r.has("seeds")) b.seeds = int_array<2>(j.at("seeds"), r.where("seeds"));
  b.time_samples = r.integer("time_samples", b.time_samples);
  r.finish();
  return b;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  ObjectReader r(j, "config");
  r.string("description", "");
  {
    ObjectReader m(r.at("model"), "model");
    c.model = m.string("name", "");
    const auto& names = contact::model_names();
    if (std::find(names.begin(), names.end(), c.model) == names.end()) {
      throw InvalidInput("model.name: unknown model '" + c.model + "'");
    }
    if (m.has("params")) parse_params(r.at("model").at("params"), c.params);
    m.finish();
  }
  const std::string backend = r.string("backend", "analytic");
  if (backend == "analytic") {
    c.backend = chart::Backend::Analytic;
  } else if (backend == "finite_difference") {
    c.backend = chart::Backend::FiniteDifference;
  } else {
    throw InvalidInput("config.backend: expected 'analytic' or 'finite_difference'");
  }
  if (r.has("fd_step")) c.fd_step = ObjectReader::as_number(j.at("fd_step"), "config.fd_step");
  if (r.has("tolerance")) c.tolerance = ObjectReader::as_number(j.at("tolerance"), "config.tolerance");
  c.f = r.string("f", "");
  const int seed = r.integer("seed", 0);
  if (seed < 0) throw InvalidInput("config.seed: must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);

  if (r.has("verify")) {
    ObjectReader v(j.at("verify"), "verify");
    c.verify.random_perturbations = v.integer("random_perturbations", c.verify.random_perturbations);
    c.verify.jacobi_points = v.integer("jacobi_points", c.verify.jacobi_points);
    c.verify.jacobi_time = v.number("jacobi_time", c.verify.jacobi_time);
    c.verify.jacobi_step = v.number("jacobi_step", c.verify.jacobi_step);
    v.finish();
  }
  if (r.has("realize_local")) {
    ObjectReader l(j.at("realize_local"), "realize_local");
    if (l.has("flow_box")) c.flow_box = parse_box(j.at("realize_local").at("flow_box"));
    c.local.step = l.number("step", c.local.step);
    c.local.clamp_floor = l.number("clamp_floor", c.local.clamp_floor);
    l.finish();
  }
  if (r.has("realize_global")) {
    ObjectReader g(j.at("realize_global"), "realize_global");
    auto& o = c.global;
    o.epsilon = g.number("epsilon", o.epsilon);
    o.n_max = g.integer("n_max", o.n_max);
    o.step = g.number("step", o.step);
    if (g.has("seeds")) o.seeds = int_array<2>(j.at("realize_global").at("seeds"), g.where("seeds"));
    o.tau_cells = g.integer("tau_cells", o.tau_cells);
    o.band_cells = g.integer("band_cells", o.band_cells);
    o.residual_tau_samples = g.integer("residual_tau_samples", o.residual_tau_samples);
    o.path_steps = g.integer("path_steps", o.path_steps);
    o.clamp_floor = g.number("clamp_floor", o.clamp_floor);
    g.finish();
  }
  if (r.has("distance")) {
    ObjectReader d(j.at("distance"), "distance");
    const json& ms = d.at("metrics");
    if (!ms.is_array()) throw InvalidInput("distance.metrics: expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      ObjectReader m(ms[i], "distance.metrics[" + std::to_string(i) + "]");
      DistanceMetric dm;
      dm.label = m.string("label", "g" + std::to_string(i));
      dm.lambda = m.string("lambda", dm.lambda);
      dm.eta = m.string("eta", dm.eta);
      m.finish();
      c.distance.metrics.push_back(dm);
    }
    c.distance.path_steps = d.integer("path_steps", c.distance.path_steps);
    d.finish();
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace rr::app
