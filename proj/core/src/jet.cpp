#include "rr/jet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rr {
namespace {

struct Tables {
  std::array<std::array<int, 3>, kJetCapacity> exponents{};
  std::array<int, kJetCapacity> degree{};
  int index[kMaxJetOrder + 1][kMaxJetOrder + 1][kMaxJetOrder + 1];
  // products[K] lists (i, j, k) with deg(i) + deg(j) <= K and monomial(i) * monomial(j) = monomial(k).
  std::array<std::vector<std::array<int, 3>>, kMaxJetOrder + 1> products;

  Tables() {
    for (auto& a : index)
      for (auto& b : a)
        for (int& c : b) c = -1;
    int n = 0;
    for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
      for (int a = deg; a >= 0; --a) {
        for (int b = deg - a; b >= 0; --b) {
          const int c = deg - a - b;
          exponents[static_cast<std::size_t>(n)] = {a, b, c};
          degree[static_cast<std::size_t>(n)] = deg;
          index[a][b][c] = n;
          ++n;
        }
      }
    }
    for (int order = 0; order <= kMaxJetOrder; ++order) {
      const int size = jet_size(order);
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          const auto& ei = exponents[static_cast<std::size_t>(i)];
          const auto& ej = exponents[static_cast<std::size_t>(j)];
          if (degree[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(j)] > order) continue;
          products[static_cast<std::size_t>(order)].push_back(
              {i, j, index[ei[0] + ej[0]][ei[1] + ej[1]][ei[2] + ej[2]]});
        }
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

int result_order(const Jet& a, const Jet& b, bool& exact) {
  exact = a.exact() && b.exact();
  if (exact) return 0;
  if (a.exact()) return b.order();
  if (b.exact()) return a.order();
  return std::min(a.order(), b.order());
}

}  // namespace

Jet Jet::variable(int axis, double value, int order) {
  if (order < 0 || order > kMaxJetOrder) throw std::out_of_range("jet order out of range");
  Jet j = zero(order);
  j.c_[0] = value;
  if (order >= 1) j.c_[static_cast<std::size_t>(1 + axis)] = 1.0;
  return j;
}

Jet Jet::zero(int order) {
  Jet j;
  j.exact_ = false;
  j.order_ = order;
  return j;
}

int Jet::monomial_index(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0 || a + b + c > kMaxJetOrder) return -1;
  return tables().index[a][b][c];
}

std::array<int, 3> Jet::monomial(int index) { return tables().exponents[static_cast<std::size_t>(index)]; }

double Jet::d(int axis) const {
  if (exact_ || order_ < 1) return 0.0;
  return c_[static_cast<std::size_t>(1 + axis)];
}

double Jet::d2(int i, int j) const {
  if (exact_ || order_ < 2) return 0.0;
  std::array<int, 3> e{0, 0, 0};
  ++e[static_cast<std::size_t>(i)];
  ++e[static_cast<std::size_t>(j)];
  const double c = c_[static_cast<std::size_t>(monomial_index(e[0], e[1], e[2]))];
  return i == j ? 2.0 * c : c;
}

Jet Jet::partial(int axis) const {
  if (exact_) return Jet(0.0);
  const int out_order = std::max(order_ - 1, 0);
  Jet r = zero(out_order);
  if (order_ == 0) return r;
  const auto& t = tables();
  for (int m = 0; m < jet_size(out_order); ++m) {
    auto e = t.exponents[static_cast<std::size_t>(m)];
    const double factor = e[static_cast<std::size_t>(axis)] + 1;
    ++e[static_cast<std::size_t>(axis)];
    r.c_[static_cast<std::size_t>(m)] = factor * c_[static_cast<std::size_t>(t.index[e[0]][e[1]][e[2]])];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (exact_ || order >= order_) return *this;
  Jet r = zero(order);
  std::copy_n(c_.begin(), jet_size(order), r.c_.begin());
  return r;
}

void Jet::promote_to(int order) {
  exact_ = false;
  order_ = order;
}

Jet& Jet::operator+=(const Jet& rhs) {
  bool exact = false;
  const int order = result_order(*this, rhs, exact);
  if (exact) {
    c_[0] += rhs.c_[0];
    return *this;
  }
  if (exact_) {
    promote_to(order);
  } else if (order < order_) {
    *this = truncated(order);
  }
  const int n = rhs.exact_ ? 1 : jet_size(order);
  for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] += rhs.c_[static_cast<std::size_t>(i)];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  bool exact = false;
  const int order = result_order(*this, rhs, exact);
  if (exact) {
    c_[0] -= rhs.c_[0];
    return *this;
  }
  if (exact_) {
    promote_to(order);
  } else if (order < order_) {
    *this = truncated(order);
  }
  const int n = rhs.exact_ ? 1 : jet_size(order);
  for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] -= rhs.c_[static_cast<std::size_t>(i)];
  return *this;
}

Jet& Jet::operator*=(double s) {
  const int n = size();
  for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.exact_) return b * a.c_[0];
  if (b.exact_) return a * b.c_[0];
  const int order = std::min(a.order_, b.order_);
  Jet r = Jet::zero(order);
  for (const auto& p : tables().products[static_cast<std::size_t>(order)]) {
    r.c_[static_cast<std::size_t>(p[2])] +=
        a.c_[static_cast<std::size_t>(p[0])] * b.c_[static_cast<std::size_t>(p[1])];
  }
  return r;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }

Jet& Jet::operator/=(const Jet& rhs) {
  if (rhs.exact_) return *this *= (1.0 / rhs.c_[0]);
  return *this = *this * reciprocal(rhs);
}

Jet operator-(Jet a) { return a *= -1.0; }

Jet compose_univariate(const Jet& arg, const double* taylor, int count) {
  if (arg.exact_) return Jet(taylor[0]);
  const int order = arg.order_;
  if (count < order + 1) throw std::logic_error("compose_univariate: not enough Taylor coefficients");
  Jet h = arg;
  h.c_[0] = 0.0;
  Jet r(taylor[order]);
  for (int n = order - 1; n >= 0; --n) {
    r = r * h;
    r.c_[0] += taylor[n];
  }
  if (r.exact_) r.promote_to(order);
  return r;
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 4> cycle{s, c, -s, -c};
  std::array<double, kMaxJetOrder + 1> t{};
  double fact = 1.0;
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    if (n > 0) fact *= n;
    t[static_cast<std::size_t>(n)] = cycle[static_cast<std::size_t>(n % 4)] / fact;
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 4> cycle{c, -s, -c, s};
  std::array<double, kMaxJetOrder + 1> t{};
  double fact = 1.0;
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    if (n > 0) fact *= n;
    t[static_cast<std::size_t>(n)] = cycle[static_cast<std::size_t>(n % 4)] / fact;
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  std::array<double, kMaxJetOrder + 1> t{};
  double fact = 1.0;
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    if (n > 0) fact *= n;
    t[static_cast<std::size_t>(n)] = e / fact;
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet log(const Jet& a) {
  const double x = a.value();
  std::array<double, kMaxJetOrder + 1> t{};
  t[0] = std::log(x);
  double p = 1.0;
  for (int n = 1; n <= kMaxJetOrder; ++n) {
    p *= x;
    t[static_cast<std::size_t>(n)] = ((n % 2 == 1) ? 1.0 : -1.0) / (n * p);
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet pow(const Jet& a, double p) {
  const double x = a.value();
  std::array<double, kMaxJetOrder + 1> t{};
  double binom = 1.0;
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    if (n > 0) binom *= (p - (n - 1)) / n;
    if (a.exact() && n > 0) break;
    t[static_cast<std::size_t>(n)] = binom * std::pow(x, p - n);
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet sqrt(const Jet& a) {
  if (a.exact()) return Jet(std::sqrt(a.value()));
  return pow(a, 0.5);
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (a.exact()) return Jet(1.0 / x);
  std::array<double, kMaxJetOrder + 1> t{};
  double p = x;
  for (int n = 0; n <= kMaxJetOrder; ++n) {
    t[static_cast<std::size_t>(n)] = ((n % 2 == 0) ? 1.0 : -1.0) / p;
    p *= x;
  }
  return compose_univariate(a, t.data(), kMaxJetOrder + 1);
}

Jet compose(const Jet& f, const std::array<Jet, 3>& shift) {
  int order = -1;
  for (const auto& s : shift)
    if (!s.exact()) order = std::max(order, s.order());
  if (order < 0 || f.exact()) return Jet(f.value());
  if (order > f.order()) {
    throw std::logic_error("compose: displacement order exceeds the order of the expansion");
  }

  // Identity displacement: x_i - p0_i is exactly the i-th variable.
  bool identity = true;
  for (int i = 0; i < 3 && identity; ++i) {
    const auto& s = shift[static_cast<std::size_t>(i)];
    if (s.exact() || s.order() != order) {
      identity = false;
      break;
    }
    for (int m = 1; m < jet_size(order); ++m) {
      const double expected = (m == 1 + i) ? 1.0 : 0.0;
      if (s.coeff(m) != expected) {
        identity = false;
        break;
      }
    }
  }
  if (identity) return f.truncated(order);

  std::array<std::array<Jet, kMaxJetOrder + 1>, 3> powers;
  for (std::size_t i = 0; i < 3; ++i) {
    Jet h = shift[i].exact() ? Jet::zero(order) : shift[i];
    h.coeff(0) = 0.0;
    powers[i][0] = Jet(1.0);
    for (int n = 1; n <= order; ++n) {
      powers[i][static_cast<std::size_t>(n)] = (n == 1) ? h : powers[i][static_cast<std::size_t>(n - 1)] * h;
    }
  }
  Jet r = Jet::zero(order);
  r.coeff(0) = f.value();
  for (int m = 1; m < jet_size(order); ++m) {
    const double c = f.coeff(m);
    if (c == 0.0) continue;
    const auto e = Jet::monomial(m);
    Jet term = powers[0][static_cast<std::size_t>(e[0])] * powers[1][static_cast<std::size_t>(e[1])];
    term = term * powers[2][static_cast<std::size_t>(e[2])];
    r += term * c;
  }
  return r;
}

std::ostream& operator<<(std::ostream& os, const Jet& j) {
  os << "Jet(order=" << (j.exact() ? std::string("exact") : std::to_string(j.order())) << ", [";
  for (int i = 0; i < j.size(); ++i) os << (i ? ", " : "") << j.coeff(i);
  return os << "])";
}

}  // namespace rr
