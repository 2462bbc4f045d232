#include "rr/tensor.hpp"

#include <algorithm>
#include <numbers>

namespace rr {

std::array<double, 3> symmetric_eigenvalues(const Mat3d& m) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  std::array<double, 3> ev{};
  if (p1 == 0.0) {
    ev = {m[0][0], m[1][1], m[2][2]};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const double q = trace(m) / 3.0;
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) + (m[2][2] - q) * (m[2][2] - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3d b = m;
  for (std::size_t i = 0; i < 3; ++i) b[i][i] -= q;
  b = (1.0 / p) * b;
  const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  ev = {e3, e2, e1};
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool is_positive_definite(const Mat3d& m) {
  const double m1 = m[0][0];
  const double m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m1 > 0.0 && m2 > 0.0 && det(m) > 0.0;
}

}  // namespace rr
