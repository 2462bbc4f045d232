#include "rr/chart/calculus.hpp"

#include <cmath>

#include "rr/errors.hpp"

namespace rr::chart {

JetVec lie_bracket(const JetVec& u, const JetVec& v) {
  JetVec r;
  for (std::size_t i = 0; i < 3; ++i) {
    Jet acc = u[0] * v[i].partial(0) - v[0] * u[i].partial(0);
    for (int j = 1; j < 3; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      acc += u[sj] * v[i].partial(j) - v[sj] * u[i].partial(j);
    }
    r[i] = acc;
  }
  return r;
}

JetMat exterior_derivative(const JetVec& w) {
  JetMat r;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) {
        r[i][j] = Jet(0.0);
      } else if (j < i) {
        r[i][j] = -r[j][i];
      } else {
        r[i][j] = w[j].partial(static_cast<int>(i)) - w[i].partial(static_cast<int>(j));
      }
    }
  }
  return r;
}

JetVec lie_bracket(const VectorField& u, const VectorField& v, const Vec3d& p, int order, Backend backend,
                   const FdOptions& fd) {
  return lie_bracket(evaluate_jet(u, p, order + 1, backend, nullptr, fd),
                     evaluate_jet(v, p, order + 1, backend, nullptr, fd));
}

JetMat exterior_derivative(const OneForm& w, const Vec3d& p, int order, Backend backend, const FdOptions& fd) {
  return exterior_derivative(evaluate_jet(w, p, order + 1, backend, nullptr, fd));
}

double integrate(const Density& rho, const Quadrature& q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = rho(q.points[i]);
    if (!std::isfinite(v)) throw ComputationError("non-finite density at " + format_point(q.points[i]));
    sum += q.weights[i] * v;
  }
  return sum;
}

IntegralEstimate integrate_density(const Density& rho, const ChartDomain& dom, bool check_refinement,
                                   double tolerance) {
  IntegralEstimate est;
  est.value = integrate(rho, dom.quadrature());
  est.refined_value = est.value;
  if (check_refinement) {
    est.refined_value = integrate(rho, dom.refined().quadrature());
    if (std::fabs(est.change()) > tolerance) {
      throw ComputationError("quadrature did not converge under grid doubling: change " +
                             std::to_string(est.change()));
    }
  }
  return est;
}

}  // namespace rr::chart
