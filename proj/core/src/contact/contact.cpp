#include "rr/contact/contact.hpp"

#include <cmath>

#include "rr/chart/calculus.hpp"
#include "rr/errors.hpp"

namespace rr::contact {

ContactData ContactData::with_backend(Backend b) const {
  ContactData r = *this;
  r.backend = b;
  return r;
}

namespace {

Vec3d checked(const ContactData& cd, const Vec3d& p) {
  if (!cd.domain.contains(p)) {
    throw InvalidInput(cd.name + ": point " + format_point(p) + " lies outside the chart bounds");
  }
  return cd.domain.wrap(p);
}

template <class T>
Vec3<T> truncate(const Vec3<T>& v, int order) {
  return {v[0].truncated(order), v[1].truncated(order), v[2].truncated(order)};
}

Mat3d symmetrize(const Mat3d& m) { return 0.5 * (m + transpose(m)); }

}  // namespace

JetVec field_jets(const ContactData& cd, const chart::VectorField& v, const Vec3d& p, int order) {
  const Vec3d q = checked(cd, p);
  if (cd.backend == Backend::FiniteDifference) {
    JetVec r;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& f = v[i];
      r[i] = chart::fd_taylor([&f](const Vec3d& x) { return f(x); }, q, order, cd.fd).jet;
    }
    return r;
  }
  const JetVec s = seed_point(q, order);
  JetVec r;
  for (std::size_t i = 0; i < 3; ++i) {
    r[i] = v[i](s);
    if (r[i].exact()) {
      const double c = r[i].value();
      r[i] = Jet::zero(order);
      r[i].coeff(0) = c;
    }
  }
  return r;
}

ContactJets contact_jets(const ContactData& cd, const Vec3d& p, int order) {
  if (order < 0 || order + 1 > kMaxJetOrder) throw InvalidInput("contact jets support orders 0..3");
  ContactJets cj;
  cj.order = order;
  cj.alpha = field_jets(cd, cd.alpha, p, order + 1);
  cj.dalpha = chart::exterior_derivative(cj.alpha);
  const JetVec a = truncate(cj.alpha, order);
  const JetVec w{cj.dalpha[1][2], cj.dalpha[2][0], cj.dalpha[0][1]};
  cj.density = dot(a, w);
  if (!(cj.density.value() > 0.0)) {
    throw ComputationError(cd.name + ": alpha ^ d alpha is not positive at " + format_point(p) +
                           " (Reeb system singular)");
  }
  cj.reeb = scale(reciprocal(cj.density), w);
  cj.e = field_jets(cd, cd.e, p, order);
  cj.je = field_jets(cd, cd.je, p, order);
  const Mat3d frame = values(from_columns(cj.e, cj.je, cj.reeb));
  if (std::fabs(det(frame)) < 1e-14) {
    throw ComputationError(cd.name + ": section (e, Je, X) is degenerate at " + format_point(p));
  }
  cj.J = complex_structure(cj.e, cj.je, cj.reeb);
  const Jet inv_theta(1.0 / cd.theta_prime);
  const JetMat dj = matmul(cj.dalpha, cj.J);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      const Jet gij = 0.5 * inv_theta * (dj[i][j] + dj[j][i]) + a[i] * a[j];
      cj.g[i][j] = gij;
      cj.g[j][i] = gij;
    }
  }
  return cj;
}

JetVec reeb_jets(const ContactData& cd, const Vec3d& p, int order) {
  if (order < 0 || order + 1 > kMaxJetOrder) throw InvalidInput("Reeb jets support orders 0..3");
  const JetVec alpha = field_jets(cd, cd.alpha, p, order + 1);
  const JetMat d = chart::exterior_derivative(alpha);
  const JetVec w{d[1][2], d[2][0], d[0][1]};
  const Jet density = dot(truncate(alpha, order), w);
  if (!(density.value() > 0.0)) {
    throw ComputationError(cd.name + ": alpha ^ d alpha is not positive at " + format_point(p));
  }
  return scale(reciprocal(density), w);
}

ReebSolution reeb_field(const chart::OneForm& alpha, const Vec3d& p, Backend backend, const Vec3d& s) {
  JetVec a;
  for (std::size_t i = 0; i < 3; ++i) a[i] = chart::evaluate_jet(alpha[i], p, 1, backend);
  const Mat3d d = values(chart::exterior_derivative(a));
  const Vec3d av = values(a);

  // Coefficients in the basis f_i = s_i d_i.
  Vec3d as{};
  Mat3d ds{};
  for (std::size_t i = 0; i < 3; ++i) {
    as[i] = s[i] * av[i];
    for (std::size_t j = 0; j < 3; ++j) ds[i][j] = s[i] * s[j] * d[i][j];
  }
  Mat3d normal{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      normal[i][j] = as[i] * as[j];
      for (std::size_t k = 0; k < 3; ++k) normal[i][j] += ds[k][i] * ds[k][j];
    }
  const double scale_ref = std::pow(trace(normal) / 3.0, 3);
  if (!(std::fabs(det(normal)) > 1e-14 * scale_ref)) {
    throw ComputationError("Reeb system is singular at " + format_point(p) + " (form is not contact there)");
  }
  const Vec3d xs = matvec(inverse(normal), as);

  ReebSolution out;
  for (std::size_t i = 0; i < 3; ++i) out.reeb[i] = s[i] * xs[i];
  out.alpha_residual = std::fabs(dot(av, out.reeb) - 1.0);
  const Vec3d k = matvec(d, out.reeb);
  for (double c : k) out.kernel_residual = std::fmax(out.kernel_residual, std::fabs(c));
  return out;
}

ContactCheck verify_contact(const chart::OneForm& alpha, const chart::ChartDomain& dom, Backend backend) {
  const auto q = dom.quadrature();
  if (q.size() == 0) throw InvalidInput("verify_contact: empty grid");
  ContactCheck r;
  r.min_density = INFINITY;
  r.max_density = -INFINITY;
  for (const auto& p : q.points) {
    JetVec a;
    for (std::size_t i = 0; i < 3; ++i) a[i] = chart::evaluate_jet(alpha[i], p, 1, backend, &dom);
    const Mat3d d = values(chart::exterior_derivative(a));
    const double rho = chart::wedge_with_differential(values(a), d);
    if (rho < r.min_density) {
      r.min_density = rho;
      r.argmin = p;
    }
    r.max_density = std::fmax(r.max_density, rho);
  }
  r.samples = q.size();
  return r;
}

MetricField compatible_metric(const ContactData& cd) {
  return MetricField([cd](const Vec3d& p, int order) { return contact_jets(cd, p, order).g; },
                     [cd](const Vec3d& p) { return values(contact_jets(cd, p, 0).g); }, cd.name + ":g");
}

MetricField build_compatible_metric(const ContactData& cd) {
  for (const auto& p : cd.domain.quadrature().points) {
    const ContactJets cj = contact_jets(cd, p, 0);
    const double rot = bilinear(values(cj.dalpha), values(cj.e), values(cj.je));
    if (!(rot > 0.0)) {
      throw InvalidInput(cd.name + ": J is not d alpha-compatible at " + format_point(p));
    }
    if (!is_positive_definite(values(cj.g))) {
      throw InvalidInput(cd.name + ": compatible metric is not positive definite at " + format_point(p));
    }
  }
  return compatible_metric(cd);
}

bool ValidationReport::passed(double tol) const {
  return alpha_reeb_residual <= tol && kernel_residual <= tol && section_residual <= tol &&
         rotation_residual <= tol && complex_residual <= tol && symmetry_residual <= tol && min_eigenvalue > 0.0 &&
         volume_residual <= tol && min_density > 0.0 && unit_reeb_residual <= tol;
}

ValidationReport validate(const ContactData& cd) {
  ValidationReport r;
  r.min_eigenvalue = INFINITY;
  r.min_density = INFINITY;
  for (const auto& p : cd.domain.quadrature().points) {
    const ContactJets cj = contact_jets(cd, p, 0);
    const Vec3d a = values(cj.alpha), x = values(cj.reeb), e = values(cj.e), je = values(cj.je);
    const Mat3d d = values(cj.dalpha), J = values(cj.J), g = values(cj.g);
    r.alpha_reeb_residual = std::fmax(r.alpha_reeb_residual, std::fabs(dot(a, x) - 1.0));
    for (double k : matvec(d, x)) r.kernel_residual = std::fmax(r.kernel_residual, std::fabs(k));
    r.section_residual = std::fmax(r.section_residual, std::fmax(std::fabs(dot(a, e)), std::fabs(dot(a, je))));
    r.rotation_residual = std::fmax(r.rotation_residual, std::fabs(bilinear(d, e, je) - cd.theta_prime));
    // J^2 + id restricted to ker(alpha): compare on the basis (e, Je).
    const Mat3d J2 = matmul(J, J);
    r.complex_residual = std::fmax(r.complex_residual, norm(matvec(J2, e) + e));
    r.complex_residual = std::fmax(r.complex_residual, norm(matvec(J2, je) + je));
    Mat3d raw = (1.0 / cd.theta_prime) * matmul(d, J);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) raw[i][j] += a[i] * a[j];
    r.symmetry_residual = std::fmax(r.symmetry_residual, max_abs(raw - transpose(raw)));
    r.min_eigenvalue = std::fmin(r.min_eigenvalue, symmetric_eigenvalues(symmetrize(g))[0]);
    const double vol = std::sqrt(std::fmax(det(g), 0.0));
    r.volume_residual = std::fmax(r.volume_residual, std::fabs(vol - cj.density.value() / cd.theta_prime));
    r.min_density = std::fmin(r.min_density, cj.density.value());
    r.unit_reeb_residual = std::fmax(r.unit_reeb_residual, std::fabs(bilinear(g, x, x) - 1.0));
    ++r.samples;
  }
  return r;
}

FrameJets section_frame(const ContactData& cd, const Vec3d& p, int order) {
  const ContactJets cj = contact_jets(cd, p, order);
  return FrameJets{cj.e, cj.je, cj.reeb, cj.dalpha, order};
}

FrameJets seeded_frame(const ContactData& cd, const Vec3d& p, int order, double angle, int* seed_axis) {
  return seeded_frame(cd, contact_jets(cd, p, order), angle, seed_axis);
}

FrameJets seeded_frame(const ContactData& cd, const ContactJets& cj, double angle, int* seed_axis) {
  const int order = cj.order;
  const JetVec a = truncate(cj.alpha, order);
  int axis = 0;
  JetVec e1;
  for (; axis < 2; ++axis) {
    for (std::size_t i = 0; i < 3; ++i) {
      e1[i] = -(a[static_cast<std::size_t>(axis)] * cj.reeb[i]);
      if (static_cast<int>(i) == axis) e1[i] += 1.0;
    }
    if (norm(values(e1)) >= 1e-8) break;
  }
  if (axis == 2) throw ComputationError(cd.name + ": frame seeding degenerates (alpha vanishes on d_x and d_y)");
  if (seed_axis) *seed_axis = axis;
  const JetVec je1 = matvec(cj.J, e1);
  const Jet n = bilinear(cj.dalpha, e1, je1);
  if (!(n.value() > 0.0)) throw ComputationError(cd.name + ": seeded frame has d alpha(e, Je) <= 0");
  const Jet s = sqrt(cd.theta_prime * reciprocal(n));
  JetVec e = scale(s, e1), je = scale(s, je1);
  if (angle != 0.0) {
    const double c = std::cos(angle), sn = std::sin(angle);
    const JetVec er = scale(c, e) + scale(sn, je);
    const JetVec jr = scale(-sn, e) + scale(c, je);
    e = er;
    je = jr;
  }
  return FrameJets{e, je, cj.reeb, cj.dalpha, order};
}

FramePoint frame_point(const ContactData& cd, const Vec3d& p, double angle) {
  FramePoint fp;
  const FrameJets f = seeded_frame(cd, p, 0, angle, &fp.seed_axis);
  fp.point = p;
  fp.e = values(f.e);
  fp.je = values(f.je);
  fp.x = values(f.x);
  fp.angle = angle;
  return fp;
}

StructureFunctions structure_functions(const FrameJets& f) {
  const JetVec ex = chart::lie_bracket(f.e, f.x);
  const JetVec jx = chart::lie_bracket(f.je, f.x);
  return StructureFunctions{bilinear(f.dalpha, ex, f.je), bilinear(f.dalpha, ex, f.e), bilinear(f.dalpha, jx, f.je),
                            bilinear(f.dalpha, jx, f.e)};
}

JetMat lie_derivative_J(const JetMat& J, const JetVec& x) {
  JetMat dx;  // dx[i][j] = d_j X^i
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) dx[i][j] = x[i].partial(static_cast<int>(j));
  JetMat r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      Jet acc = x[0] * J[i][j].partial(0) + x[1] * J[i][j].partial(1) + x[2] * J[i][j].partial(2);
      for (std::size_t k = 0; k < 3; ++k) acc += J[i][k] * dx[k][j] - dx[i][k] * J[k][j];
      r[i][j] = acc;
    }
  return r;
}

JetMat lie_derivative_g(const JetMat& g, const JetVec& x) {
  JetMat r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      Jet acc = x[0] * g[i][j].partial(0) + x[1] * g[i][j].partial(1) + x[2] * g[i][j].partial(2);
      for (std::size_t k = 0; k < 3; ++k) {
        acc += g[k][j] * x[k].partial(static_cast<int>(i)) + g[i][k] * x[k].partial(static_cast<int>(j));
      }
      r[i][j] = acc;
    }
  return r;
}

}  // namespace rr::contact
