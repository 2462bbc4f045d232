#include "rr/realization/realization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <utility>

#include "rr/contact/models.hpp"
#include "rr/curvature/curvature.hpp"
#include "rr/errors.hpp"

namespace rr::realization {

using contact::ContactJets;

ContactData perturb_complex_structure(const ContactData& cd, const PerturbationField& p) {
  for (const auto& q : cd.domain.quadrature().points) {
    const double eta = p.eta(cd.domain.wrap(q));
    if (!(eta > 0.0)) {
      throw InvalidInput(cd.name + ": perturbation eta must be positive, got " + std::to_string(eta) + " at " +
                         format_point(q));
    }
  }
  ContactData r = contact::with_section_perturbation(cd, p.lambda, p.eta);
  r.notes.push_back("complex structure perturbed: e -> eta^2 Je + lambda e");
  contact::build_compatible_metric(r);  // SPD check on the grid
  return r;
}

PerturbedRicci ricci_perturbed_closed_form(const ContactData& cd, const PerturbationField& p, const Vec3d& point) {
  const auto frame = contact::section_frame(cd, point, 1);
  const auto sf = contact::structure_functions(frame);
  const double a = sf.a.value(), b = sf.b.value(), c = sf.c.value(), d = sf.d.value();
  const Vec3d x = values(frame.x);
  const Jet eta = chart::evaluate_jet(p.eta, point, 1, cd.backend, &cd.domain, cd.fd);
  const Jet lam = chart::evaluate_jet(p.lambda, point, 1, cd.backend, &cd.domain, cd.fd);
  if (!(eta.value() > 0.0)) throw InvalidInput("ricci_perturbed_closed_form: eta must be positive");
  const Jet ratio = lam / eta;
  double x_eta = 0.0, x_ratio = 0.0;
  for (int i = 0; i < 3; ++i) {
    x_eta += x[static_cast<std::size_t>(i)] * eta.d(i);
    x_ratio += x[static_cast<std::size_t>(i)] * ratio.d(i);
  }
  const double th = cd.theta_prime, e = eta.value(), l = lam.value();
  const double mu = l / (e * e);
  PerturbedRicci r;
  r.P_total = (a + mu * b) / th + x_eta / e;
  const double q_star = (b / (e * e) - e * e * c - l * (a + d) - (l * l / (e * e)) * b) / (2.0 * th);
  r.Q_total = q_star - l / (2.0 * e) * x_eta + 0.5 * e * x_ratio;
  r.ricci = -2.0 * r.P_total * r.P_total + 0.5 * th * th - 2.0 * r.Q_total * r.Q_total;
  return r;
}

namespace {

struct Brackets {
  Vec3d point;
  double a, b, c, d;
};

double ricci_lambda(const Brackets& s, double lambda, double th) {
  const double P = (s.a + lambda * s.b) / th;
  const double Q = (s.b - s.c - lambda * (s.a + s.d) - lambda * lambda * s.b) / (2.0 * th);
  return -2.0 * P * P + 0.5 * th * th - 2.0 * Q * Q;
}

double max_ricci_lambda(const std::vector<Brackets>& pts, double lambda, double th) {
  double m = -INFINITY;
  for (const auto& s : pts) m = std::fmax(m, ricci_lambda(s, lambda, th));
  return m;
}

}  // namespace

SweepResult sweep_lower_ricci(const ContactData& cd, double c, const SweepOptions& opts) {
  const double th = cd.theta_prime;
  const double ceiling = 0.5 * th * th;
  if (c > ceiling * (1.0 + 1e-12)) {
    throw InvalidInput("sweep_lower_ricci: c exceeds theta'^2 / 2 = " + std::to_string(ceiling));
  }
  std::vector<Brackets> pts;
  bool below_somewhere = false;
  for (const auto& q : cd.domain.quadrature().points) {
    const auto sf = contact::structure_functions(contact::section_frame(cd, q, 1));
    pts.push_back({q, sf.a.value(), sf.b.value(), sf.c.value(), sf.d.value()});
    if (ricci_lambda(pts.back(), 0.0, th) < ceiling * (1.0 - 1e-9)) below_somewhere = true;
  }
  if (!below_somewhere) {
    throw InvalidInput(cd.name + ": Ricci(X) = theta'^2 / 2 at every grid point (K-contact); "
                       "the lambda polynomial is constant and cannot be lowered");
  }

  SweepResult r;
  r.points = pts.size();
  std::optional<double> found;
  double best_lambda = 0.0, best_value = max_ricci_lambda(pts, 0.0, th);
  if (best_value < c) found = 0.0;
  for (double bracket = opts.initial_bracket; !found && bracket <= opts.bracket_limit; bracket *= 2.0) {
    for (int j = 1; j <= opts.samples_per_side && !found; ++j) {
      for (double sign : {1.0, -1.0}) {
        const double lam = sign * bracket * j / opts.samples_per_side;
        const double v = max_ricci_lambda(pts, lam, th);
        if (v < best_value) {
          best_value = v;
          best_lambda = lam;
        }
        if (v < c) {
          found = lam;
          r.bracket = bracket;
          break;
        }
      }
    }
  }
  if (!found) {
    std::ostringstream os;
    os << cd.name << ": no constant lambda within |lambda| <= " << opts.bracket_limit << " gives max Ricci < " << c
       << "; best lambda " << best_lambda << " reaches " << best_value << "; blocking points:";
    int listed = 0;
    for (const auto& s : pts) {
      const double v = ricci_lambda(s, best_lambda, th);
      if (v >= c && listed < 5) {
        os << ' ' << format_point(s.point) << " (Ricci " << v << ")";
        ++listed;
      }
    }
    throw ComputationError(os.str());
  }
  r.lambda = *found;
  r.max_closed = max_ricci_lambda(pts, r.lambda, th);
  r.max_oracle = r.max_closed;
  if (opts.verify_with_oracle) {
    const ContactData lowered = contact::with_section_perturbation(cd, ScalarField(r.lambda), ScalarField(1.0));
    r.max_oracle = -INFINITY;
    for (const auto& s : pts) r.max_oracle = std::fmax(r.max_oracle, curvature::ricci_reeb_oracle(lowered, s.point));
  }
  return r;
}

namespace {

constexpr int kStateOrder = 2;

// Scales the coefficient of dz^k by zscale^k (substitutes dz -> zscale dz).
Jet restrict_z(const Jet& j, double zscale) {
  if (j.exact() || zscale == 1.0) return j;
  Jet r = j;
  for (int i = 0; i < j.size(); ++i) {
    const int k = Jet::monomial(i)[2];
    if (k > 0) r.coeff(i) *= zscale == 0.0 ? 0.0 : std::pow(zscale, k);
  }
  return r;
}

struct State {
  Jet ell, mu;
};

State axpy(const State& y, const Jet& s, const State& k) { return {y.ell + s * k.ell, y.mu + s * k.mu}; }

class FlowSolver {
 public:
  FlowSolver(ContactData cd, ScalarField f, FlowBox box, double step, double clamp_floor)
      : cd_(std::move(cd)), f_(std::move(f)), box_(box) {
    steps_ = std::max(1, static_cast<int>(std::ceil(box_.T / step - 1e-9)));
    h_ = box_.T / steps_;
    const double th = cd_.theta_prime;
    ceiling_ = 0.5 * th * th;
    floor_arg_ = 0.5 * clamp_floor * th * th;
  }

  int steps() const { return steps_; }
  double h() const { return h_; }
  std::size_t clamp_events() const { return clamps_.load(); }

  /// (ln eta, mu) as jets of the given order at p.
  std::array<Jet, 2> jets(const Vec3d& p, int order) const {
    if (order > kStateOrder) throw ComputationError("realized fields support jets up to order 2");
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (last_ && last_->point == p && last_->order == order) return last_->value;
    }
    const double t = p[2] - box_.z0;
    const double slack = 1e-12 * std::fmax(1.0, box_.T);
    if (t < -slack || t > box_.T + slack || p[0] < box_.x.lo - slack || p[0] > box_.x.hi + slack ||
        p[1] < box_.y.lo - slack || p[1] > box_.y.hi + slack) {
      throw InvalidInput("realized field evaluated outside the flow box at " + format_point(p));
    }
    const double tc = std::clamp(t, 0.0, box_.T);
    int n = static_cast<int>(std::floor(tc / h_));
    n = std::clamp(n, 0, steps_ - 1);
    const double h0 = tc - n * h_;
    const State yn = stored(p[0], p[1], n);

    const double tn = n * h_;
    const Jet s = Jet::variable(2, h0, kStateOrder);
    const State k1 = rhs(coefficients(p[0], p[1], tn, 0.0), yn);
    const Coeffs mid = coefficients(p[0], p[1], tn + 0.5 * h0, 0.5);
    const State k2 = rhs(mid, axpy(yn, 0.5 * s, k1));
    const State k3 = rhs(mid, axpy(yn, 0.5 * s, k2));
    const State k4 = rhs(coefficients(p[0], p[1], tn + h0, 1.0), axpy(yn, s, k3));
    const Jet w = s * (1.0 / 6.0);
    State y{yn.ell + w * (k1.ell + 2.0 * k2.ell + 2.0 * k3.ell + k4.ell),
            yn.mu + w * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu)};
    std::array<Jet, 2> out{y.ell.truncated(order), y.mu.truncated(order)};
    std::lock_guard<std::mutex> lock(mutex_);
    last_ = Last{p, order, out};
    return out;
  }

 private:
  struct Coeffs {
    Vec3d point;
    Jet a, b, c, d, f;
  };
  struct Column {
    std::vector<std::array<double, 2 * kJetCapacity>> states;
  };
  struct Last {
    Vec3d point;
    int order;
    std::array<Jet, 2> value;
  };

  Coeffs coefficients(double x, double y, double t, double zscale) const {
    const Vec3d q{x, y, box_.z0 + t};
    const auto sf = contact::structure_functions(contact::section_frame(cd_, q, kStateOrder + 1));
    const Jet f = chart::evaluate_jet(f_, cd_.domain.wrap(q), kStateOrder, cd_.backend, &cd_.domain, cd_.fd);
    return {q, restrict_z(sf.a, zscale), restrict_z(sf.b, zscale), restrict_z(sf.c, zscale), restrict_z(sf.d, zscale),
            restrict_z(f, zscale)};
  }

  State rhs(const Coeffs& co, const State& y) const {
    const double th = cd_.theta_prime;
    const double fv = co.f.value();
    if (fv > ceiling_ * (1.0 + 1e-12) + 1e-12) {
      throw AdmissibilityError("prescribed f = " + std::to_string(fv) + " exceeds theta'^2/2 = " +
                                   std::to_string(ceiling_) + " at " + format_point(co.point),
                               co.point, fv, ceiling_);
    }
    const Jet arg = 0.25 * th * th - 0.5 * co.f;
    Jet root(0.0);
    if (arg.value() <= floor_arg_) {
      clamps_.fetch_add(1);
    } else {
      root = sqrt(arg);
    }
    const double half = 0.5 / th;
    const Jet e2 = exp(-2.0 * y.ell);
    State d;
    d.ell = -(co.a + y.mu * co.b) * (1.0 / th);
    d.mu = 2.0 * (e2 * root - e2 * e2 * co.b * half + co.c * half + y.mu * (co.a + co.d) * half +
                  y.mu * y.mu * co.b * half);
    return d;
  }

  State stored(double x, double y, int n) const {
    const Column& col = column(x, y);
    const auto& raw = col.states[static_cast<std::size_t>(n)];
    State s{Jet::zero(kStateOrder), Jet::zero(kStateOrder)};
    const int m = jet_size(kStateOrder);
    for (int i = 0; i < m; ++i) {
      s.ell.coeff(i) = raw[static_cast<std::size_t>(i)];
      s.mu.coeff(i) = raw[static_cast<std::size_t>(m + i)];
    }
    return s;
  }

  const Column& column(double x, double y) const {
    const auto key = std::make_pair(x, y);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Column col = integrate(x, y);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(col)).first->second;
  }

  Column integrate(double x, double y) const {
    std::vector<Coeffs> co;
    co.reserve(static_cast<std::size_t>(2 * steps_ + 1));
    for (int j = 0; j <= 2 * steps_; ++j) co.push_back(coefficients(x, y, 0.5 * j * h_, 0.0));
    Column col;
    col.states.reserve(static_cast<std::size_t>(steps_) + 1);
    State s{Jet::zero(kStateOrder), Jet::zero(kStateOrder)};
    auto store = [&](const State& st) {
      std::array<double, 2 * kJetCapacity> raw{};
      const int m = jet_size(kStateOrder);
      for (int i = 0; i < m; ++i) {
        raw[static_cast<std::size_t>(i)] = st.ell.coeff(i);
        raw[static_cast<std::size_t>(m + i)] = st.mu.coeff(i);
      }
      col.states.push_back(raw);
    };
    store(s);
    const Jet h(h_);
    for (int n = 0; n < steps_; ++n) {
      const auto i = static_cast<std::size_t>(2 * n);
      const State k1 = rhs(co[i], s);
      const State k2 = rhs(co[i + 1], axpy(s, 0.5 * h, k1));
      const State k3 = rhs(co[i + 1], axpy(s, 0.5 * h, k2));
      const State k4 = rhs(co[i + 2], axpy(s, h, k3));
      const double w = h_ / 6.0;
      s.ell = s.ell + w * (k1.ell + 2.0 * k2.ell + 2.0 * k3.ell + k4.ell);
      s.mu = s.mu + w * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu);
      if (!std::isfinite(s.ell.value()) || !std::isfinite(s.mu.value()) || std::fabs(s.ell.value()) > 30.0) {
        throw ComputationError("realization: eta over/underflow on the flowline from seed " +
                               format_point({x, y, box_.z0}) + " at t = " + std::to_string((n + 1) * h_));
      }
      store(s);
    }
    return col;
  }

  ContactData cd_;
  ScalarField f_;
  FlowBox box_;
  int steps_ = 1;
  double h_ = 0.0;
  double ceiling_ = 0.0;
  double floor_arg_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, Column> cache_;
  mutable std::optional<Last> last_;
  mutable std::atomic<std::size_t> clamps_{0};
};

class RealizedSource final : public chart::TaylorSource {
 public:
  RealizedSource(std::shared_ptr<const FlowSolver> solver, int component)
      : solver_(std::move(solver)), component_(component) {}
  double value(const Vec3d& p) const override { return solver_->jets(p, 0)[static_cast<std::size_t>(component_)].value(); }
  Jet taylor(const Vec3d& p, int order) const override {
    return solver_->jets(p, order)[static_cast<std::size_t>(component_)];
  }
  int max_order() const override { return kStateOrder; }
  std::string describe() const override { return component_ == 0 ? "realized_ln_eta" : "realized_mu"; }

 private:
  std::shared_ptr<const FlowSolver> solver_;
  int component_;
};

std::vector<double> midpoints(const Interval& iv, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(iv.lo + (i + 0.5) * iv.length() / n);
  return r;
}

void check_flow_box(const ContactData& cd, const FlowBox& box, const RealizeOptions& opts) {
  if (!(box.T > 0.0) || !(opts.step > 0.0) || box.seeds[0] < 1 || box.seeds[1] < 1 || box.time_samples < 1) {
    throw InvalidInput("flow box needs T > 0, step > 0 and at least one seed and sample time");
  }
  if (!(box.x.length() > 0.0) || !(box.y.length() > 0.0)) throw InvalidInput("flow box Sigma_0 is empty");
  for (double x : {box.x.lo, box.x.hi})
    for (double y : {box.y.lo, box.y.hi})
      for (double z : {box.z0, box.z0 + box.T}) {
        if (!cd.domain.contains({x, y, z})) {
          throw InvalidInput("flow box corner " + format_point({x, y, z}) + " lies outside the chart");
        }
      }
  for (double x : midpoints(box.x, 2))
    for (double y : midpoints(box.y, 2))
      for (double t : {0.0, 0.5 * box.T, box.T}) {
        const Vec3d q{x, y, box.z0 + t};
        const Vec3d r = values(contact::reeb_jets(cd, q, 0));
        if (std::fabs(r[0]) + std::fabs(r[1]) + std::fabs(r[2] - 1.0) > 1e-10) {
          throw InvalidInput("flow box requires the Reeb field to be d_z; found " + format_point(r) + " at " +
                             format_point(q));
        }
      }
}

}  // namespace

RealizationSolution local_realize(const ContactData& cd, const ScalarField& f, const FlowBox& box,
                                  const RealizeOptions& opts) {
  check_flow_box(cd, box, opts);
  const double ceiling = 0.5 * cd.theta_prime * cd.theta_prime;
  const auto xs = midpoints(box.x, box.seeds[0]);
  const auto ys = midpoints(box.y, box.seeds[1]);
  // Admissibility scan before any integration.
  const int scan = 4 * box.time_samples;
  for (double x : xs)
    for (double y : ys)
      for (int k = 0; k <= scan; ++k) {
        const Vec3d q{x, y, box.z0 + box.T * k / scan};
        const double fv = f(cd.domain.wrap(q));
        if (!std::isfinite(fv)) throw InvalidInput("prescribed f is not finite at " + format_point(q));
        if (fv > ceiling * (1.0 + 1e-12) + 1e-12) {
          throw AdmissibilityError("prescribed f = " + std::to_string(fv) + " exceeds theta'^2/2 = " +
                                       std::to_string(ceiling) + " at " + format_point(q),
                                   q, fv, ceiling);
        }
      }

  auto solver = std::make_shared<FlowSolver>(cd, f, box, opts.step, opts.clamp_floor);
  RealizationSolution sol;
  sol.box = box;
  sol.step = solver->h();
  sol.ceiling = ceiling;
  sol.ell = ScalarField::from_source(std::make_shared<RealizedSource>(solver, 0));
  sol.mu = ScalarField::from_source(std::make_shared<RealizedSource>(solver, 1));
  const ScalarField eta = exp(sol.ell);
  sol.perturbation = PerturbationField{sol.mu * exp(2.0 * sol.ell), eta};
  sol.realized = contact::with_section_perturbation(cd, sol.perturbation.lambda, sol.perturbation.eta);
  sol.realized.name = cd.name + "+realized";
  sol.realized.domain =
      chart::ChartDomain({box.x, box.y, Interval{box.z0, box.z0 + box.T}}, {false, false, false},
                         {std::max(4, box.seeds[0]), std::max(4, box.seeds[1]), std::max(4, box.time_samples)}, 0.0);
  sol.realized.notes.push_back("complex structure realized along the Reeb flow from Sigma_0");

  for (double x : xs)
    for (double y : ys) {
      const Vec3d q{x, y, box.z0};
      const Mat3d g0 = values(contact::contact_jets(cd, q, 0).g);
      const Mat3d g1 = values(contact::contact_jets(sol.realized, q, 0).g);
      sol.boundary_residual = std::fmax(sol.boundary_residual, max_abs(g1 - g0));
    }
  if (opts.verify) {
    for (double x : xs)
      for (double y : ys)
        for (double t : midpoints(Interval{0.0, box.T}, box.time_samples)) {
          RealizationSample s;
          s.point = {x, y, box.z0 + t};
          const auto j = solver->jets(s.point, 0);
          s.eta = std::exp(j[0].value());
          s.mu = j[1].value();
          s.f = f(cd.domain.wrap(s.point));
          s.ricci = curvature::ricci_reeb_oracle(sol.realized, s.point);
          s.residual = std::fabs(s.ricci - s.f);
          sol.residual_sup = std::fmax(sol.residual_sup, s.residual);
          sol.max_ricci_excess = std::fmax(sol.max_ricci_excess, s.ricci - ceiling);
          sol.samples.push_back(s);
        }
  }
  sol.max_ricci_excess = std::fmax(sol.max_ricci_excess, 0.0);
  sol.clamp_events = solver->clamp_events();
  return sol;
}

namespace {

class SmoothstepSource final : public chart::TaylorSource {
 public:
  SmoothstepSource(double end, double delta) : start_(end - delta), delta_(delta) {}
  double value(const Vec3d& p) const override { return poly((p[2] - start_) / delta_)[0]; }
  Jet taylor(const Vec3d& p, int order) const override {
    const auto d = poly((p[2] - start_) / delta_);
    std::array<double, kMaxJetOrder + 1> c{};
    double scale = 1.0;
    for (int k = 0; k <= order; ++k) {
      c[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(k)] * scale;
      scale /= delta_;
    }
    return compose_univariate(Jet::variable(2, p[2], order), c.data(), order + 1);
  }
  std::string describe() const override { return "smoothstep_band"; }

 private:
  // Taylor coefficients h^(k)(s) / k! of the quintic smoothstep, clamped outside [0, 1].
  static std::array<double, kMaxJetOrder + 1> poly(double s) {
    std::array<double, kMaxJetOrder + 1> r{};
    if (s <= 0.0) return r;
    if (s >= 1.0) {
      r[0] = 1.0;
      return r;
    }
    const double s2 = s * s, s3 = s2 * s;
    r[0] = s3 * (10.0 - 15.0 * s + 6.0 * s2);
    r[1] = 30.0 * s2 * (1.0 - s) * (1.0 - s);
    r[2] = (60.0 * s - 180.0 * s2 + 120.0 * s3) / 2.0;
    r[3] = (60.0 - 360.0 * s + 360.0 * s2) / 6.0;
    r[4] = (-360.0 + 720.0 * s) / 24.0;
    return r;
  }

  double start_, delta_;
};

}  // namespace

ScalarField smoothstep_band(double period, double delta) {
  if (!(delta > 0.0) || delta > period) throw InvalidInput("smoothstep_band: need 0 < delta <= period");
  return ScalarField::from_source(std::make_shared<SmoothstepSource>(period, delta));
}

AlmostGlobalResult almost_global_realize(const ContactData& cd, const ScalarField& f, const GlobalOptions& opts) {
  if (!cd.domain.periodic()[2] || cd.domain.periodic()[0] || cd.domain.periodic()[1]) {
    throw InvalidInput("almost_global_realize needs the fibered chart: periodic tau axis over a base square");
  }
  if (!(opts.epsilon > 0.0) || opts.n_max < 1) throw InvalidInput("almost_global_realize: need epsilon > 0, n_max >= 1");
  const auto& tb = cd.domain.bounds()[2];
  const double period = tb.length();
  const Interval bx = cd.domain.sampled_interval(0), by = cd.domain.sampled_interval(1);

  AlmostGlobalResult out;
  FlowBox box;
  box.x = bx;
  box.y = by;
  box.z0 = tb.lo;
  box.T = period;
  box.seeds = opts.seeds;
  box.time_samples = opts.residual_tau_samples;
  RealizeOptions ro;
  ro.step = opts.step;
  ro.clamp_floor = opts.clamp_floor;
  ro.verify = false;
  out.local = local_realize(cd, f, box, ro);
  out.local.realized.domain = cd.domain;

  // Band volume per unit delta: the compatible volume density integrated over Sigma_0.
  const auto xs = midpoints(bx, opts.seeds[0]);
  const auto ys = midpoints(by, opts.seeds[1]);
  const double cell_xy = bx.length() * by.length() / (opts.seeds[0] * opts.seeds[1]);
  double v1 = 0.0;
  for (double x : xs)
    for (double y : ys)
      v1 += cell_xy * contact::contact_jets(cd, {x, y, tb.lo}, 0).density.value() / cd.theta_prime;
  out.band_volume_per_delta = v1;

  std::vector<double> eps, delta;
  for (int n = 0; n <= opts.n_max; ++n) {
    eps.push_back(opts.epsilon / std::pow(2.0, n));
    delta.push_back(0.9 * 0.5 * eps.back() / v1);
  }
  if (delta.front() >= period) {
    throw InvalidInput("almost_global_realize: epsilon too large, the first band covers the whole period");
  }

  // Tau partition refined on every band annulus.
  std::vector<std::pair<double, double>> cells;
  auto split = [&cells](double a, double b, int n) {
    for (int i = 0; i < n; ++i) cells.emplace_back(a + (b - a) * i / n, a + (b - a) * (i + 1) / n);
  };
  split(tb.lo, tb.hi - delta[0], opts.tau_cells);
  for (int n = 0; n < opts.n_max; ++n) split(tb.hi - delta[n], tb.hi - delta[n + 1], opts.band_cells);
  split(tb.hi - delta.back(), tb.hi, opts.band_cells);
  chart::Quadrature q;
  for (const auto& [a, b] : cells)
    for (double x : xs)
      for (double y : ys) {
        q.points.push_back({x, y, 0.5 * (a + b)});
        q.weights.push_back(cell_xy * (b - a));
      }

  const contact::MetricField reference = contact::compatible_metric(cd);
  const metric::SampledTensor ref_s = metric::sample(reference, q);
  out.reference_volume = metric::volume(ref_s, q);

  out.sequence.quadrature = q;
  out.sequence.reference = reference;
  out.sequence.layer_volume = bx.length() * by.length() * (period - delta[0]) / opts.tau_cells;
  out.sequence.path_steps = opts.path_steps;

  const ScalarField& lam = out.local.perturbation.lambda;
  const ScalarField& eta = out.local.perturbation.eta;
  const double ceiling = 0.5 * cd.theta_prime * cd.theta_prime;
  for (int n = 0; n <= opts.n_max; ++n) {
    SequenceElement el;
    el.n = n;
    el.epsilon = eps[static_cast<std::size_t>(n)];
    double d = delta[static_cast<std::size_t>(n)];
    ContactData cdn;
    // The interpolant stays in the family e -> eta~^2 Je + lambda~ e, so J~^2 = -id holds by construction.
    for (int attempt = 0; attempt < 2; ++attempt) {
      const ScalarField h = smoothstep_band(tb.hi, d);
      const ScalarField lam_n = (1.0 - h) * lam;
      const ScalarField eta_n = sqrt((1.0 - h) * eta * eta + h);
      cdn = contact::with_section_perturbation(cd, lam_n, eta_n);
      cdn.name = cd.name + "+g_eps_" + std::to_string(n);
      el.min_eigenvalue = INFINITY;
      for (double x : xs)
        for (double y : ys)
          for (double s : {0.1, 0.5, 0.9}) {
            const Vec3d p{x, y, tb.hi - d + s * d};
            el.min_eigenvalue = std::fmin(el.min_eigenvalue, symmetric_eigenvalues(values(contact::contact_jets(cdn, p, 0).g))[0]);
          }
      if (el.min_eigenvalue > 0.0) break;
      if (attempt == 1) {
        throw ComputationError("interpolated complex structure lost d alpha-compatibility at n = " + std::to_string(n));
      }
      d *= 0.5;
    }
    el.delta = d;
    el.structure = cdn;

    // Ricci(X) = f outside the band; the bound everywhere.
    for (double x : xs)
      for (double y : ys) {
        for (double t : midpoints(Interval{tb.lo, tb.hi - d}, opts.residual_tau_samples)) {
          const Vec3d p{x, y, t};
          const double ric = curvature::ricci_reeb_oracle(cdn, p);
          el.residual_outside_band = std::fmax(el.residual_outside_band, std::fabs(ric - f(p)));
          el.max_ricci_excess = std::fmax(el.max_ricci_excess, ric - ceiling);
        }
        for (double s : {0.25, 0.75}) {
          const double ric = curvature::ricci_reeb_oracle(cdn, {x, y, tb.hi - d + s * d});
          el.max_ricci_excess = std::fmax(el.max_ricci_excess, ric - ceiling);
        }
      }
    el.max_ricci_excess = std::fmax(el.max_ricci_excess, 0.0);

    const contact::MetricField gn = contact::compatible_metric(cdn);
    const metric::SampledTensor gs = metric::sample(gn, q);
    el.volume = metric::volume(gs, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q.points[i][2] >= tb.hi - d) el.band_volume += q.weights[i] * std::sqrt(det(ref_s.values[i]));
    }
    out.max_volume_drift = std::fmax(out.max_volume_drift, std::fabs(el.volume - out.reference_volume));
    out.sequence.metrics.push_back(gn);
    out.sequence.epsilons.push_back(el.epsilon);
    out.elements.push_back(std::move(el));
  }

  const double lo = tb.lo;
  const ContactData limit_cd = out.local.realized;
  out.limit.g = contact::compatible_metric(limit_cd);
  out.limit.singular = [lo, period](const Vec3d& p) {
    const double t = std::fmod(p[2] - lo, period);
    return std::fabs(t) < 1e-14 || std::fabs(t - period) < 1e-14;
  };
  out.limit.descriptor = "Sigma_0 = {tau = " + std::to_string(lo) + "}: limit discontinuous, measure zero";
  out.notes.push_back("binding neighborhood not modeled; the box margin stands in for it");
  out.notes.push_back("band interpolation keeps J in the (lambda, eta) family: lambda~ = (1-h) lambda, "
                      "eta~^2 = (1-h) eta^2 + h");
  out.notes.push_back("distances are straight-path upper bounds (d-bar >= d)");
  return out;
}

}  // namespace rr::realization
