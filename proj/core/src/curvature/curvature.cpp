#include "rr/curvature/curvature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rr/errors.hpp"

namespace rr::curvature {

using contact::ContactJets;

ChristoffelJets christoffel_jets(const JetMat& g) {
  const int order = g[0][0].order();
  if (order < 1) throw InvalidInput("Christoffel symbols need metric jets of order >= 1");
  JetMat gt;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) gt[i][j] = g[i][j].truncated(order - 1);
  if (!(std::fabs(det(values(gt))) > 1e-300)) throw ComputationError("metric is singular");
  const JetMat ginv = inverse(gt);
  // dg[a][b][c] = d_a g_bc
  std::array<JetMat, 3> dg;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c) dg[a][b][c] = g[b][c].partial(static_cast<int>(a));
  ChristoffelJets gamma;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) {
        Jet s = Jet::zero(order - 1);
        for (std::size_t l = 0; l < 3; ++l) s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        s *= 0.5;
        gamma[k][i][j] = s;
        gamma[k][j][i] = s;
      }
  return gamma;
}

Christoffel christoffel_values(const JetMat& g) {
  const ChristoffelJets gj = christoffel_jets(g);
  Christoffel r;
  for (std::size_t k = 0; k < 3; ++k) r[k] = values(gj[k]);
  return r;
}

Christoffel christoffel_oracle(const MetricField& g, const Vec3d& p) { return christoffel_values(g.jet(p, 1)); }

double metric_compatibility_residual(const JetMat& g, const Christoffel& gamma) {
  double worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = g[i][j].d(static_cast<int>(k));
        for (std::size_t m = 0; m < 3; ++m) {
          s -= gamma[m][k][i] * g[m][j].value() + gamma[m][k][j] * g[i][m].value();
        }
        worst = std::fmax(worst, std::fabs(s));
      }
  return worst;
}

Vec3d covariant_derivative(const Christoffel& gamma, const JetVec& v, const Vec3d& u) {
  Vec3d r{};
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      s += u[j] * v[k].d(static_cast<int>(j));
      for (std::size_t i = 0; i < 3; ++i) s += gamma[k][j][i] * u[j] * v[i].value();
    }
    r[k] = s;
  }
  return r;
}

Vec3d Riemann::apply(const Vec3d& u, const Vec3d& v, const Vec3d& w) const {
  Vec3d out{};
  for (std::size_t l = 0; l < 3; ++l) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) s += r[l][i][j][k] * u[i] * v[j] * w[k];
    out[l] = s;
  }
  return out;
}

Riemann riemann(const JetMat& g) {
  if (g[0][0].order() < 2) throw InvalidInput("Riemann tensor needs metric jets of order >= 2");
  const ChristoffelJets gj = christoffel_jets(g);
  Christoffel gv;
  for (std::size_t k = 0; k < 3; ++k) gv[k] = values(gj[k]);
  Riemann R;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          double s = gj[l][j][k].d(static_cast<int>(i)) - gj[l][i][k].d(static_cast<int>(j));
          for (std::size_t m = 0; m < 3; ++m) s += gv[l][i][m] * gv[m][j][k] - gv[l][j][m] * gv[m][i][k];
          R.r[l][i][j][k] = s;
        }
  return R;
}

double sectional(const Riemann& R, const Mat3d& g, const Vec3d& u, const Vec3d& v) {
  const double uu = bilinear(g, u, u), vv = bilinear(g, v, v), uv = bilinear(g, u, v);
  const double area2 = uu * vv - uv * uv;
  if (!(area2 > 1e-20 * uu * vv)) throw InvalidInput("sectional curvature: plane is degenerate");
  return bilinear(g, R.apply(u, v, v), u) / area2;
}

double sectional_oracle(const MetricField& g, const Vec3d& p, const Vec3d& u, const Vec3d& v) {
  const JetMat gj = g.jet(p, 2);
  return sectional(riemann(gj), values(gj), u, v);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FrameValues {
  Vec3d e, je, x;
};

FrameValues frame_values(const contact::FrameJets& f) { return {values(f.e), values(f.je), values(f.x)}; }

double ricci_from(const Riemann& R, const Mat3d& g, const FrameValues& f) {
  return sectional(R, g, f.e, f.x) + sectional(R, g, f.je, f.x);
}

Vec3d closed_reeb_derivative(const ContactData& cd, const Mat3d& J, const Mat3d& lxj, const Vec3d& e) {
  const Vec3d inner = scale(0.5 * cd.theta_prime, e) - scale(0.5, matvec(lxj, e));
  return matvec(J, inner);
}

void require_in_xi(const ContactData& cd, const ContactJets& cj, const Vec3d& e) {
  const double leak = std::fabs(dot(values(cj.alpha), e));
  if (leak > 1e-8 * std::fmax(norm(e), 1e-300)) {
    throw InvalidInput(cd.name + ": vector is not in ker(alpha) (|alpha(e)| = " + std::to_string(leak) + ")");
  }
}

}  // namespace

double ricci_reeb_oracle(const ContactData& cd, const Vec3d& p) {
  const ContactJets cj = contact_jets(cd, p, 2);
  const FrameValues f = frame_values(contact::seeded_frame(cd, cj));
  return ricci_from(riemann(cj.g), values(cj.g), f);
}

PQ pq_from_structure(double a, double b, double c, double theta_prime) {
  PQ r;
  r.P = a / theta_prime;
  r.Q = (b - c) / (2.0 * theta_prime);
  r.ricci = -2.0 * r.P * r.P + 0.5 * theta_prime * theta_prime - 2.0 * r.Q * r.Q;
  return r;
}

PQ pq_ricci(const ContactData& cd, const FramePoint& fp) {
  const auto sf = contact::structure_functions(contact::seeded_frame(cd, fp.point, 1, fp.angle));
  return pq_from_structure(sf.a.value(), sf.b.value(), sf.c.value(), cd.theta_prime);
}

ReebDerivative covariant_reeb_derivative(const ContactData& cd, const Vec3d& p, const Vec3d& e) {
  const ContactJets cj = contact_jets(cd, p, 1);
  require_in_xi(cd, cj, e);
  const Christoffel gamma = christoffel_values(cj.g);
  ReebDerivative r;
  r.closed = closed_reeb_derivative(cd, values(cj.J), values(contact::lie_derivative_J(cj.J, cj.reeb)), e);
  r.oracle = covariant_derivative(gamma, cj.reeb, e);
  r.residual = norm(r.closed - r.oracle);
  r.normal = bilinear(values(cj.g), r.oracle, values(cj.reeb));
  return r;
}

namespace {

SecondFundamental second_fundamental_from(const Mat3d& g, const Christoffel& gamma, const JetVec& reeb,
                                          const FrameValues& f) {
  const std::array<Vec3d, 2> basis{f.e, f.je};
  SecondFundamental s;
  for (std::size_t a = 0; a < 2; ++a) {
    const Vec3d nx = covariant_derivative(gamma, reeb, basis[a]);
    for (std::size_t b = 0; b < 2; ++b) s.ii[a][b] = -bilinear(g, basis[b], nx);
  }
  s.H = s.ii[0][0] + s.ii[1][1];
  s.G = s.ii[0][0] * s.ii[1][1] - s.ii[0][1] * s.ii[1][0];
  return s;
}

}  // namespace

SecondFundamental second_fundamental(const ContactData& cd, const Vec3d& p) {
  const ContactJets cj = contact_jets(cd, p, 1);
  const FrameValues f = frame_values(contact::seeded_frame(cd, cj));
  return second_fundamental_from(values(cj.g), christoffel_values(cj.g), cj.reeb, f);
}

double JacobiPath::area_drift() const {
  double worst = 0.0;
  if (area.empty()) return worst;
  for (double a : area) worst = std::fmax(worst, std::fabs(a - area.front()));
  return worst / area.front();
}

namespace {

struct FlowState {
  Vec3d x, v, w;
};

FlowState flow_rhs(const ContactData& cd, const FlowState& s) {
  if (!cd.domain.contains(s.x)) {
    throw InvalidInput(cd.name + ": Reeb flowline leaves the chart at " + format_point(s.x));
  }
  const JetVec X = contact::reeb_jets(cd, s.x, 1);
  Mat3d dx{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) dx[i][j] = X[i].d(static_cast<int>(j));
  return {values(X), matvec(dx, s.v), matvec(dx, s.w)};
}

FlowState axpy(const FlowState& s, double h, const FlowState& k) {
  return {s.x + scale(h, k.x), s.v + scale(h, k.v), s.w + scale(h, k.w)};
}

FlowState rk4_step(const ContactData& cd, const FlowState& s, double h) {
  const FlowState k1 = flow_rhs(cd, s);
  const FlowState k2 = flow_rhs(cd, axpy(s, 0.5 * h, k1));
  const FlowState k3 = flow_rhs(cd, axpy(s, 0.5 * h, k2));
  const FlowState k4 = flow_rhs(cd, axpy(s, h, k3));
  FlowState r = s;
  const double c = h / 6.0;
  r.x = r.x + scale(c, k1.x + scale(2.0, k2.x) + scale(2.0, k3.x) + k4.x);
  r.v = r.v + scale(c, k1.v + scale(2.0, k2.v) + scale(2.0, k3.v) + k4.v);
  r.w = r.w + scale(c, k1.w + scale(2.0, k2.w) + scale(2.0, k3.w) + k4.w);
  if (!cd.domain.contains(r.x)) {
    throw InvalidInput(cd.name + ": Reeb flowline leaves the chart at " + format_point(r.x));
  }
  return r;
}

void record(const ContactData& cd, JacobiPath& path, double t, const FlowState& s) {
  const ContactJets cj = contact_jets(cd, s.x, 0);
  const Mat3d g = values(cj.g);
  const double vv = bilinear(g, s.v, s.v), ww = bilinear(g, s.w, s.w), vw = bilinear(g, s.v, s.w);
  path.t.push_back(t);
  path.x.push_back(s.x);
  path.v.push_back(s.v);
  path.w.push_back(s.w);
  path.e.push_back(scale(1.0 / std::sqrt(vv), s.v));
  path.beta.push_back(std::acos(std::fmax(-1.0, std::fmin(1.0, vw / std::sqrt(vv * ww)))));
  path.area.push_back(std::sqrt(std::fmax(vv * ww - vw * vw, 0.0)));
  path.max_alpha_leak = std::fmax(path.max_alpha_leak, std::fabs(dot(values(cj.alpha), s.v)) / norm(s.v));
}

}  // namespace

JacobiPath alpha_jacobi_propagate(const ContactData& cd, const Vec3d& p, const Vec3d& v0, double T, int steps) {
  if (steps < 1) throw InvalidInput("alpha_jacobi_propagate: steps must be positive");
  const ContactJets cj = contact_jets(cd, p, 0);
  require_in_xi(cd, cj, v0);
  if (!(norm(v0) > 0.0)) throw InvalidInput("alpha_jacobi_propagate: v0 is zero");
  JacobiPath path;
  path.t.reserve(static_cast<std::size_t>(steps) + 1);
  FlowState s{p, v0, matvec(values(cj.J), v0)};
  record(cd, path, 0.0, s);
  const double h = T / steps;
  for (int n = 1; n <= steps; ++n) {
    s = rk4_step(cd, s, h);
    record(cd, path, n * h, s);
  }
  return path;
}

double jacobi_equation_residual(const ContactData& cd, const JacobiPath& path, int stride) {
  const std::size_t n = path.t.size();
  const std::size_t step = static_cast<std::size_t>(stride < 1 ? 1 : stride);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += step) {
    const ContactJets cj = contact_jets(cd, path.x[i], 2);
    const ChristoffelJets gj = christoffel_jets(cj.g);
    const Vec3d x = values(cj.reeb);
    const Vec3d& v = path.v[i];
    Mat3d dx{};  // dx[k][j] = d_j X^k
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t j = 0; j < 3; ++j) dx[k][j] = cj.reeb[k].d(static_cast<int>(j));
    const Vec3d vdot = matvec(dx, v);
    Christoffel gamma;
    for (std::size_t k = 0; k < 3; ++k) gamma[k] = values(gj[k]);
    // N = nabla_v X = D_t v; dN/dt differentiates N(x(t), v(t)) exactly along the flow.
    Vec3d nv{}, dn{};
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < 3; ++j) {
        nv[k] += v[j] * dx[k][j];
        dn[k] += vdot[j] * dx[k][j];
        for (std::size_t a = 0; a < 3; ++a) {
          dn[k] += v[j] * x[a] * cj.reeb[k].d2(static_cast<int>(a), static_cast<int>(j));
        }
        for (std::size_t m = 0; m < 3; ++m) {
          const Jet& gkjm = gj[k][j][m];
          nv[k] += gkjm.value() * v[j] * x[m];
          double along = 0.0;
          for (std::size_t a = 0; a < 3; ++a) along += x[a] * gkjm.d(static_cast<int>(a));
          dn[k] += along * v[j] * x[m] + gkjm.value() * (vdot[j] * x[m] + v[j] * dx[m][0] * x[0] +
                                                         v[j] * dx[m][1] * x[1] + v[j] * dx[m][2] * x[2]);
        }
      }
    }
    Vec3d d2 = dn;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) d2[k] += gamma[k][a][b] * x[a] * nv[b];
    const Riemann R = riemann(cj.g);
    const Vec3d res = d2 + R.apply(v, x, x);
    worst = std::fmax(worst, norm(res) / std::fmax(1.0, norm(v)));
  }
  return worst;
}

double sectional_via_jacobi(const ContactData& cd, const Vec3d& p, const Vec3d& e_in, double dt) {
  const ContactJets cj = contact_jets(cd, p, 1);
  require_in_xi(cd, cj, e_in);
  const Mat3d g = values(cj.g);
  const Vec3d e = scale(1.0 / std::sqrt(bilinear(g, e_in, e_in)), e_in);
  const Vec3d je = matvec(values(cj.J), e);
  const Mat3d lxg = values(contact::lie_derivative_g(cj.g, cj.reeb));
  const Mat3d da = values(cj.dalpha);
  // g(nabla_u X, v) = 1/2 [(L_X g)(u, v) + d alpha(u, v)]
  const double g_je = 0.5 * (bilinear(lxg, e, je) + bilinear(da, e, je));
  const double g_e = 0.5 * bilinear(lxg, e, e);

  auto phi = [&](double t) {
    const JacobiPath path = alpha_jacobi_propagate(cd, p, e, t, 1);
    const ContactJets c = contact_jets(cd, path.x.back(), 1);
    const Vec3d v = path.v.back();
    const Mat3d l = values(contact::lie_derivative_g(c.g, c.reeb));
    return 0.5 * bilinear(l, v, v) / bilinear(values(c.g), v, v);
  };
  const double d1 = (phi(dt) - phi(-dt)) / (2.0 * dt);
  const double d2 = (phi(0.5 * dt) - phi(-0.5 * dt)) / dt;
  const double dphi = (4.0 * d2 - d1) / 3.0;
  return g_je * g_je - g_e * g_e - dphi;
}

int count_cyclic_zeros(const double* s, int n, double floor) {
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    const double a = s[i], b = s[(i + 1) % n];
    if (std::fabs(a) <= floor) {
      ++zeros;
      continue;
    }
    if (std::fabs(b) > floor && (a > 0.0) != (b > 0.0)) ++zeros;
  }
  return zeros;
}

Equivalence max_ricci_equivalence(const ContactData& cd, const Vec3d& p, double tau) {
  const ContactJets cj = contact_jets(cd, p, 2);
  const FrameValues f = frame_values(contact::seeded_frame(cd, cj));
  const Mat3d g = values(cj.g);
  Equivalence r;
  r.ricci_gap = 0.5 * cd.theta_prime * cd.theta_prime - ricci_from(riemann(cj.g), g, f);

  const Mat3d lxg = values(contact::lie_derivative_g(cj.g, cj.reeb));
  const Mat3d lxj = values(contact::lie_derivative_J(cj.J, cj.reeb));
  const Mat3d frame_inv = inverse(from_columns(f.e, f.je, f.x));
  const std::array<Vec3d, 2> basis{f.e, f.je};
  double sj = 0.0, sg = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const Vec3d col = matvec(frame_inv, matvec(lxj, basis[a]));
    for (std::size_t b = 0; b < 2; ++b) {
      sj += col[b] * col[b];
      const double m = bilinear(lxg, basis[a], basis[b]);
      sg += m * m;
    }
  }
  r.lxj_norm = std::sqrt(sj);
  r.lxg_norm = std::sqrt(sg);

  for (int k = 0; k < kSweepDirections; ++k) {
    const double phi = kTwoPi * k / kSweepDirections;
    const Vec3d u = scale(std::cos(phi), f.e) + scale(std::sin(phi), f.je);
    const double s = 0.5 * bilinear(lxg, u, u);  // g(u, nabla_u X)
    r.sweep[static_cast<std::size_t>(k)] = s;
    r.sweep_max = std::fmax(r.sweep_max, std::fabs(s));
  }
  r.zero_directions = count_cyclic_zeros(r.sweep.data(), kSweepDirections, 1e-12 * std::fmax(1.0, cd.theta_prime));

  r.ricci_max = r.ricci_gap <= tau;
  r.geodesible = r.sweep_max <= std::sqrt(0.5 * tau);
  r.lxj_zero = r.lxj_norm <= 2.0 * std::sqrt(tau);
  r.lxg_zero = r.lxg_norm <= 2.0 * std::sqrt(tau);
  return r;
}

CurvatureReport curvature_report(const ContactData& cd, const Vec3d& p) {
  const ContactJets cj = contact_jets(cd, p, 2);
  const contact::FrameJets fj = contact::seeded_frame(cd, cj);
  const FrameValues f = frame_values(fj);
  const Mat3d g = values(cj.g);
  const Christoffel gamma = christoffel_values(cj.g);
  const Riemann R = riemann(cj.g);

  CurvatureReport r;
  r.point = p;
  const auto sf = contact::structure_functions(fj);
  const PQ pq = pq_from_structure(sf.a.value(), sf.b.value(), sf.c.value(), cd.theta_prime);
  r.P = pq.P;
  r.Q = pq.Q;
  r.ricci_closed = pq.ricci;
  r.k_e = sectional(R, g, f.e, f.x);
  r.k_je = sectional(R, g, f.je, f.x);
  r.ricci_oracle = r.k_e + r.k_je;
  const SecondFundamental s = second_fundamental_from(g, gamma, cj.reeb, f);
  r.G = s.G;
  r.H = s.H;
  r.ricci_residual = std::fabs(r.ricci_closed - r.ricci_oracle);
  r.gauss_residual = std::fabs(r.ricci_oracle - 2.0 * r.G);
  r.bound_excess = std::fmax(0.0, r.ricci_oracle - 0.5 * cd.theta_prime * cd.theta_prime);

  const Mat3d J = values(cj.J);
  const Mat3d lxj = values(contact::lie_derivative_J(cj.J, cj.reeb));
  const Vec3d ne = covariant_derivative(gamma, cj.reeb, f.e);
  const Vec3d nje = covariant_derivative(gamma, cj.reeb, f.je);
  r.reeb_derivative_residual = std::fmax(norm(closed_reeb_derivative(cd, J, lxj, f.e) - ne),
                                         norm(closed_reeb_derivative(cd, J, lxj, f.je) - nje));
  r.geodesic_residual = norm(covariant_derivative(gamma, cj.reeb, f.x));
  r.divergence = bilinear(g, f.e, ne) + bilinear(g, f.je, nje);
  r.compatibility_residual = metric_compatibility_residual(cj.g, gamma);
  return r;
}

bool CurvatureSweep::skipped_ok() const {
  const std::size_t total = reports.size() + skipped;
  return total > 0 && 100 * skipped <= total;
}

CurvatureSweep sweep_curvature(const ContactData& cd, const std::vector<Vec3d>& points) {
  CurvatureSweep s;
  s.reports.reserve(points.size());
  for (const auto& p : points) {
    CurvatureReport r;
    try {
      r = curvature_report(cd, p);
    } catch (const ComputationError&) {
      ++s.skipped;
      continue;
    }
    s.worst_ricci = std::fmax(s.worst_ricci, r.ricci_residual);
    s.worst_gauss = std::fmax(s.worst_gauss, r.gauss_residual);
    s.worst_bound = std::fmax(s.worst_bound, r.bound_excess);
    s.worst_H = std::fmax(s.worst_H, std::fabs(r.H));
    s.worst_reeb_derivative = std::fmax(s.worst_reeb_derivative, r.reeb_derivative_residual);
    s.worst_geodesic = std::fmax(s.worst_geodesic, r.geodesic_residual);
    s.worst_compatibility = std::fmax(s.worst_compatibility, r.compatibility_residual);
    s.reports.push_back(r);
  }
  return s;
}

}  // namespace rr::curvature
