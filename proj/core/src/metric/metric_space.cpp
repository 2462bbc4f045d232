#include "rr/metric/metric_space.hpp"

#include <algorithm>
#include <cmath>

#include "rr/errors.hpp"

namespace rr::metric {

SampledTensor sample(const MetricField& g, const Quadrature& q) {
  SampledTensor s;
  s.values.reserve(q.size());
  for (const auto& p : q.points) s.values.push_back(g(p));
  return s;
}

namespace {

void check_sizes(const Quadrature& q, std::initializer_list<const SampledTensor*> ts) {
  for (const auto* t : ts) {
    if (t->values.size() != q.size()) throw InvalidInput("sampled tensor does not match the quadrature");
  }
}

void require_spd(const Mat3d& g, const Vec3d& p, const char* what) {
  if (!is_positive_definite(g)) throw InvalidInput(std::string(what) + ": metric is not positive definite at " + format_point(p));
}

// tr(a b) for 3x3 matrices.
double trace_product(const Mat3d& a, const Mat3d& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) s += a[i][j] * b[j][i];
  return s;
}

double pointwise_inner(const Mat3d& g, const Mat3d& h, const Mat3d& k) {
  const Mat3d gi = inverse(g);
  return trace_product(matmul(gi, h), matmul(gi, k)) * std::sqrt(det(g));
}

}  // namespace

double l2_inner(const SampledTensor& g, const SampledTensor& h, const SampledTensor& k, const Quadrature& q) {
  check_sizes(q, {&g, &h, &k});
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    require_spd(g.values[i], q.points[i], "l2_inner");
    s += q.weights[i] * pointwise_inner(g.values[i], h.values[i], k.values[i]);
  }
  return s;
}

double l2_inner(const MetricField& g, const MetricField& h, const MetricField& k, const Quadrature& q) {
  return l2_inner(sample(g, q), sample(h, q), sample(k, q), q);
}

double volume(const SampledTensor& g, const Quadrature& q) {
  check_sizes(q, {&g});
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = det(g.values[i]);
    if (!std::isfinite(d)) throw InvalidInput("volume: non-finite density at " + format_point(q.points[i]));
    s += q.weights[i] * std::sqrt(std::fmax(d, 0.0));
  }
  return s;
}

double volume(const MetricField& g, const Quadrature& q) { return volume(sample(g, q), q); }

double contact_volume(const contact::ContactData& cd, const Quadrature& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double rho = contact::contact_jets(cd, q.points[i], 0).density.value() / cd.theta_prime;
    if (!std::isfinite(rho)) throw InvalidInput("volume: non-finite density at " + format_point(q.points[i]));
    s += q.weights[i] * rho;
  }
  return s;
}

double path_length_upper(const SampledTensor& g0, const SampledTensor& g1, const Quadrature& q, int steps) {
  check_sizes(q, {&g0, &g1});
  if (steps < 1) throw InvalidInput("path_length_upper: steps must be positive");
  // Points where the metrics agree contribute nothing.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (g0.values[i] != g1.values[i]) active.push_back(i);
  }
  double length = 0.0;
  for (int j = 0; j < steps; ++j) {
    const double t = (j + 0.5) / steps;
    double n2 = 0.0;
    for (std::size_t i : active) {
      const Mat3d dg = g1.values[i] - g0.values[i];
      const Mat3d gt = (1.0 - t) * g0.values[i] + t * g1.values[i];
      require_spd(gt, q.points[i], "path_length_upper");
      n2 += q.weights[i] * pointwise_inner(gt, dg, dg);
    }
    length += std::sqrt(std::fmax(n2, 0.0)) / steps;
  }
  return length;
}

double path_length_upper(const MetricField& g0, const MetricField& g1, const Quadrature& q, int steps) {
  return path_length_upper(sample(g0, q), sample(g1, q), q, steps);
}

bool differs(const Mat3d& a, const Mat3d& b, double eq_tol) {
  const double scale = std::fmax(std::fmax(max_abs(a), max_abs(b)), 1e-300);
  return max_abs(a - b) > eq_tol * scale;
}

ClarkeBound clarke_bound(const SampledTensor& g0, const SampledTensor& g1, const Quadrature& q, double eq_tol) {
  check_sizes(q, {&g0, &g1});
  ClarkeBound r;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!differs(g0.values[i], g1.values[i], eq_tol)) continue;
    ++r.difference_points;
    r.volume0 += q.weights[i] * std::sqrt(std::fmax(det(g0.values[i]), 0.0));
    r.volume1 += q.weights[i] * std::sqrt(std::fmax(det(g1.values[i]), 0.0));
  }
  r.bound = std::sqrt(r.volume0) + std::sqrt(r.volume1);
  return r;
}

ClarkeBound clarke_bound(const MetricField& g0, const MetricField& g1, const Quadrature& q, double eq_tol) {
  return clarke_bound(sample(g0, q), sample(g1, q), q, eq_tol);
}

Calibration calibrate_constant(const std::vector<std::pair<SampledTensor, SampledTensor>>& pairs, const Quadrature& q,
                               int steps) {
  Calibration c;
  for (const auto& [a, b] : pairs) {
    const double bound = clarke_bound(a, b, q).bound;
    if (bound <= 0.0) continue;
    const double ratio = path_length_upper(a, b, q, steps) / bound;
    c.ratios.push_back(ratio);
    c.c_hat = std::fmax(c.c_hat, ratio);
  }
  return c;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const std::size_t n = std::min(x.size(), y.size());
  f.points = n;
  if (n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  return f;
}

ConvergenceReport convergence_report(const MetricSequence& seq, const SemiMetricField& g_inf) {
  ConvergenceReport r;
  const Quadrature& q = seq.quadrature;
  const std::size_t m = seq.metrics.size();
  if (m == 0) return r;
  std::vector<SampledTensor> s;
  s.reserve(m);
  for (const auto& g : seq.metrics) s.push_back(sample(g, q));
  const SampledTensor ref = seq.reference.valid() ? sample(seq.reference, q) : s.front();

  // Condition 1: summable distance bounds.
  double sum = 0.0, largest = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double d = path_length_upper(s[k], s[k + 1], q, seq.path_steps);
    r.distance_bounds.push_back(d);
    sum += d;
    r.partial_sums.push_back(sum);
    largest = std::fmax(largest, d);
  }
  r.tail_estimate = sum;
  if (largest <= 1e-14) {
    r.summable = true;
    r.tail_ratio = 0.0;
  } else {
    std::vector<double> ks, logs;
    bool has_zero = false;
    for (std::size_t k = 0; k < r.distance_bounds.size(); ++k) {
      if (r.distance_bounds[k] <= 0.0) {
        has_zero = true;
        continue;
      }
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(r.distance_bounds[k]));
    }
    r.tail_fit = fit_line(ks, logs);
    r.tail_ratio = std::exp(r.tail_fit.slope);
    const bool geometric = ks.size() >= 3 && r.tail_ratio < 1.0 - 1e-3 && r.tail_fit.r2 >= 0.9;
    if (geometric) r.tail_estimate = sum + r.distance_bounds.back() * r.tail_ratio / (1.0 - r.tail_ratio);
    // A zero bound between nonzero ones means the sequence revisits points; not a geometric tail.
    r.summable = geometric && !has_zero;
  }
  if (seq.epsilons.size() >= m && !r.distance_bounds.empty() && largest > 1e-14) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < r.distance_bounds.size(); ++k) {
      if (r.distance_bounds[k] <= 0.0) continue;
      xs.push_back(std::log(std::sqrt(seq.epsilons[k])));
      ys.push_back(std::log(r.distance_bounds[k]));
    }
    r.sqrt_eps_fit = fit_line(xs, ys);
  }

  // Condition 2: deflated sets agree up to a nullset.
  const SampledTensor inf = sample(g_inf.g, q);
  std::vector<char> in_d(q.size(), 0), in_x(q.size(), 0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double dref = det(ref.values[i]);
    for (std::size_t k = 0; k < m && !in_d[i]; ++k) {
      if (det(s[k].values[i]) < kDeflationTol * dref) in_d[i] = 1;
    }
    const bool sing = g_inf.singular && g_inf.singular(q.points[i]);
    if (sing || det(inf.values[i]) < kDeflationTol * dref) in_x[i] = 1;
    const double w = q.weights[i];
    if (in_d[i]) {
      r.deflated_volume += w;
      ++r.deflated_points;
    }
    if (in_x[i]) {
      r.limit_deflated_volume += w;
      ++r.limit_deflated_points;
    }
    if (in_d[i] != in_x[i]) r.symmetric_difference += w;
  }
  r.nullset = r.symmetric_difference <= seq.layer_volume + 1e-15;

  // Condition 3: deviation from the limit shrinks in measure.
  for (std::size_t k = 0; k < m; ++k) {
    double meas = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (in_d[i] || in_x[i]) continue;
      const double scale = std::fmax(max_abs(inf.values[i]), 1e-300);
      meas += q.weights[i] * std::fmin(1.0, max_abs(s[k].values[i] - inf.values[i]) / scale);
    }
    r.deviation_measure.push_back(meas);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < m; ++k) {
    if (r.deviation_measure[k] > r.deviation_measure[k - 1] * (1.0 + 1e-9) + 1e-15) monotone = false;
  }
  const double first = r.deviation_measure.front(), last = r.deviation_measure.back();
  r.pointwise = monotone && (first <= 1e-14 || last <= 0.5 * first);
  return r;
}

}  // namespace rr::metric
