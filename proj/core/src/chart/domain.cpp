#include "rr/chart/domain.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {

std::string format_point(const Vec3d& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ")";
  return os.str();
}

}  // namespace rr

namespace rr::chart {

void Quadrature::append(const Quadrature& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

double Quadrature::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

ChartDomain::ChartDomain(std::array<Interval, 3> bounds, std::array<bool, 3> periodic, std::array<int, 3> grid,
                         double margin)
    : bounds_(bounds), periodic_(periodic), grid_(grid), margin_(margin) {
  if (!(margin >= 0.0)) throw InvalidInput("chart margin must be nonnegative");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(bounds[i].length() > 0.0)) throw InvalidInput("chart interval " + std::to_string(i) + " has no length");
    if (grid[i] < 4) throw InvalidInput("chart grid needs at least 4 samples per axis");
    if (!periodic[i] && !(margin < 0.5 * bounds[i].length())) {
      throw InvalidInput("chart margin must be less than half of every non-periodic axis");
    }
  }
}

ChartDomain ChartDomain::unit_torus(int n) {
  return ChartDomain({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {true, true, true}, {n, n, n}, 0.0);
}

ChartDomain ChartDomain::with_grid(std::array<int, 3> grid) const {
  return ChartDomain(bounds_, periodic_, grid, margin_);
}

ChartDomain ChartDomain::refined() const { return with_grid({2 * grid_[0], 2 * grid_[1], 2 * grid_[2]}); }

Vec3d ChartDomain::wrap(const Vec3d& p) const {
  Vec3d r = p;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!periodic_[i]) continue;
    const double period = bounds_[i].length();
    double t = std::fmod(p[i] - bounds_[i].lo, period);
    if (t < 0.0) t += period;
    if (t >= period) t = 0.0;
    r[i] = bounds_[i].lo + t;
  }
  return r;
}

bool ChartDomain::contains(const Vec3d& p) const {
  const Vec3d q = wrap(p);
  for (std::size_t i = 0; i < 3; ++i) {
    if (periodic_[i]) continue;
    if (q[i] < bounds_[i].lo || q[i] > bounds_[i].hi) return false;
  }
  return true;
}

bool ChartDomain::in_interior(const Vec3d& p) const {
  const Vec3d q = wrap(p);
  for (std::size_t i = 0; i < 3; ++i) {
    if (periodic_[i]) continue;
    if (q[i] < bounds_[i].lo + margin_ || q[i] > bounds_[i].hi - margin_) return false;
  }
  return true;
}

Interval ChartDomain::sampled_interval(int axis) const {
  const auto& b = bounds_[static_cast<std::size_t>(axis)];
  if (periodic_[static_cast<std::size_t>(axis)]) return b;
  return Interval{b.lo + margin_, b.hi - margin_};
}

double ChartDomain::volume() const {
  return bounds_[0].length() * bounds_[1].length() * bounds_[2].length();
}

double ChartDomain::sampled_volume() const {
  return sampled_interval(0).length() * sampled_interval(1).length() * sampled_interval(2).length();
}

double ChartDomain::cell_volume() const { return sampled_volume() / (grid_[0] * grid_[1] * grid_[2]); }

Quadrature ChartDomain::quadrature() const {
  Quadrature q;
  const std::array<Interval, 3> s{sampled_interval(0), sampled_interval(1), sampled_interval(2)};
  const double w = cell_volume();
  const std::size_t n = static_cast<std::size_t>(grid_[0]) * grid_[1] * grid_[2];
  q.points.reserve(n);
  q.weights.assign(n, w);
  for (int i = 0; i < grid_[0]; ++i) {
    const double x = s[0].lo + (i + 0.5) * s[0].length() / grid_[0];
    for (int j = 0; j < grid_[1]; ++j) {
      const double y = s[1].lo + (j + 0.5) * s[1].length() / grid_[1];
      for (int k = 0; k < grid_[2]; ++k) {
        const double z = s[2].lo + (k + 0.5) * s[2].length() / grid_[2];
        q.points.push_back({x, y, z});
      }
    }
  }
  return q;
}

}  // namespace rr::chart
