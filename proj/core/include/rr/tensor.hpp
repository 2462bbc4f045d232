#pragma once

#include <array>
#include <cmath>

#include "rr/jet.hpp"

namespace rr {

template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;
using JetVec = Vec3<Jet>;
using JetMat = Mat3<Jet>;

/// A point expanded as the identity jet of the given order (x_i = p_i + dx_i).
inline JetVec seed_point(const Vec3d& p, int order) {
  return {Jet::variable(0, p[0], order), Jet::variable(1, p[1], order), Jet::variable(2, p[2], order)};
}

inline Vec3d values(const JetVec& v) { return {v[0].value(), v[1].value(), v[2].value()}; }

inline Mat3d values(const JetMat& m) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = m[i][j].value();
  return r;
}

/// Highest non-exact order among the components, or -1 for a constant point.
inline int jet_order(const JetVec& v) {
  int order = -1;
  for (const auto& c : v)
    if (!c.exact()) order = order < c.order() ? c.order() : order;
  return order;
}

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T, class S>
Vec3<T> scale(const S& s, const Vec3<T>& a) {
  return {a[0] * s, a[1] * s, a[2] * s};
}

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
Vec3<T> matvec(const Mat3<T>& m, const Vec3<T>& v) {
  Vec3<T> r{m[0][0] * v[0], m[1][0] * v[0], m[2][0] * v[0]};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 1; j < 3; ++j) r[i] = r[i] + m[i][j] * v[j];
  return r;
}

template <class T>
Mat3<T> matmul(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      T s = a[i][0] * b[0][j];
      s = s + a[i][1] * b[1][j];
      s = s + a[i][2] * b[2][j];
      r[i][j] = s;
    }
  return r;
}

template <class T>
Mat3<T> transpose(const Mat3<T>& m) {
  Mat3<T> r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

/// Bilinear form u^T m v.
template <class T>
T bilinear(const Mat3<T>& m, const Vec3<T>& u, const Vec3<T>& v) {
  return dot(u, matvec(m, v));
}

template <class T>
T det(const Mat3<T>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Inverse by cofactors; the caller checks the determinant.
template <class T>
Mat3<T> inverse(const Mat3<T>& m) {
  const T inv_det = T(1.0) / det(m);
  Mat3<T> r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
  return r;
}

/// Matrix whose columns are a, b, c.
template <class T>
Mat3<T> from_columns(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) {
  Mat3<T> r;
  for (std::size_t i = 0; i < 3; ++i) {
    r[i][0] = a[i];
    r[i][1] = b[i];
    r[i][2] = c[i];
  }
  return r;
}

inline double norm(const Vec3d& v) { return std::sqrt(dot(v, v)); }

inline double max_abs(const Mat3d& m) {
  double r = 0.0;
  for (const auto& row : m)
    for (double x : row) r = std::fmax(r, std::fabs(x));
  return r;
}

inline Mat3d operator-(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

inline Mat3d operator+(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

inline Mat3d operator*(double s, const Mat3d& a) {
  Mat3d r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}

inline Mat3d identity3() { return Mat3d{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline double trace(const Mat3d& m) { return m[0][0] + m[1][1] + m[2][2]; }

/// Eigenvalues of a symmetric 3x3 matrix in ascending order (trigonometric method).
std::array<double, 3> symmetric_eigenvalues(const Mat3d& m);

/// Positive definiteness via leading principal minors.
bool is_positive_definite(const Mat3d& m);

}  // namespace rr
