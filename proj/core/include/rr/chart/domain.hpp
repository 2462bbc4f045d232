#pragma once

#include <array>
#include <vector>

#include "rr/tensor.hpp"

namespace rr::chart {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Weighted sample points; every integral in the library is a sum over one of these.
struct Quadrature {
  std::vector<Vec3d> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  void append(const Quadrature& other);
  double total_weight() const;
};

/// A box chart whose axes are either intervals or circles of the given period.
///
/// The grid describes the midpoint sample lattice. On non-periodic axes the
/// margin band at either end is excluded from sampling and from every check.
class ChartDomain {
 public:
  ChartDomain() = default;
  ChartDomain(std::array<Interval, 3> bounds, std::array<bool, 3> periodic, std::array<int, 3> grid,
              double margin = 0.0);

  /// Unit cube, all axes periodic with period 1.
  static ChartDomain unit_torus(int n);

  const std::array<Interval, 3>& bounds() const { return bounds_; }
  const std::array<bool, 3>& periodic() const { return periodic_; }
  const std::array<int, 3>& grid() const { return grid_; }
  double margin() const { return margin_; }

  ChartDomain with_grid(std::array<int, 3> grid) const;
  ChartDomain refined() const;  // grid doubled on every axis

  /// Reduces periodic coordinates into [lo, hi).
  Vec3d wrap(const Vec3d& p) const;
  /// True if p (after wrapping) lies inside the bounds.
  bool contains(const Vec3d& p) const;
  /// True if p lies inside the bounds and outside the margin bands.
  bool in_interior(const Vec3d& p) const;

  /// Sampled region on `axis`: the full interval on periodic axes, the interval less margins otherwise.
  Interval sampled_interval(int axis) const;
  double volume() const;          // coordinate volume of the whole box
  double sampled_volume() const;  // coordinate volume of the sampled region
  double cell_volume() const;

  /// Midpoint lattice over the sampled region.
  Quadrature quadrature() const;
  std::vector<Vec3d> sample_points() const { return quadrature().points; }

 private:
  std::array<Interval, 3> bounds_{};
  std::array<bool, 3> periodic_{};
  std::array<int, 3> grid_{4, 4, 4};
  double margin_ = 0.0;
};

}  // namespace rr::chart
