#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>

namespace rr {

/// Highest total derivative order a Jet can carry.
inline constexpr int kMaxJetOrder = 4;
/// Number of monomials of total degree <= kMaxJetOrder in three variables.
inline constexpr int kJetCapacity = 35;

/// Number of Taylor coefficients of a jet of the given order in three variables.
constexpr int jet_size(int order) { return (order + 1) * (order + 2) * (order + 3) / 6; }

/// Truncated multivariate Taylor polynomial in the three chart coordinates.
///
/// Coefficients are stored in Taylor normalization (c_a = d^a f / a!) and in
/// graded order: value, then the three first-order terms, then the six
/// second-order terms, and so on. Arithmetic truncates at the smaller order of
/// the operands. A jet built from a plain number is exact and adopts the order
/// of whatever it is combined with.
class Jet {
 public:
  Jet() = default;
  Jet(double value) : exact_(true) { c_[0] = value; }  // NOLINT(google-explicit-constructor)

  /// The coordinate function x_axis expanded about `value`.
  static Jet variable(int axis, double value, int order);
  /// Zero jet of the given (non-exact) order.
  static Jet zero(int order);

  int order() const { return order_; }
  bool exact() const { return exact_; }
  int size() const { return exact_ ? 1 : jet_size(order_); }

  double value() const { return c_[0]; }
  double coeff(int index) const { return c_[static_cast<std::size_t>(index)]; }
  double& coeff(int index) { return c_[static_cast<std::size_t>(index)]; }

  /// First partial derivative along `axis` at the expansion point.
  double d(int axis) const;
  /// Second partial derivative at the expansion point.
  double d2(int i, int j) const;

  /// Partial derivative along `axis` as a jet of one order less.
  Jet partial(int axis) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b) { Jet r = a; return r /= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a);

  /// Index of the monomial x^a y^b z^c in the graded layout.
  static int monomial_index(int a, int b, int c);
  /// Exponents of the monomial stored at `index`.
  static std::array<int, 3> monomial(int index);

 private:
  friend Jet compose_univariate(const Jet& arg, const double* taylor, int count);
  void promote_to(int order);

  std::array<double, kJetCapacity> c_{};
  int order_ = 0;
  bool exact_ = true;
};

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet reciprocal(const Jet& a);

/// f(a) for a univariate function with Taylor coefficients taylor[n] = f^(n)(a0)/n!.
Jet compose_univariate(const Jet& arg, const double* taylor, int count);

/// Substitutes a Taylor expansion taken about p0 with displacement jets.
///
/// `f` is a jet about p0; `shift[i]` are jets representing x_i - p0_i (constant
/// term ignored). The result carries the order of the displacement jets.
Jet compose(const Jet& f, const std::array<Jet, 3>& shift);

std::ostream& operator<<(std::ostream& os, const Jet& j);

}  // namespace rr
