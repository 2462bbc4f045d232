#pragma once

#include <functional>
#include <string>

#include "rr/tensor.hpp"

namespace rr::contact {

/// Symmetric bilinear form field on a chart, evaluable as a jet.
class MetricField {
 public:
  using JetFn = std::function<JetMat(const Vec3d&, int)>;
  using ValueFn = std::function<Mat3d(const Vec3d&)>;

  MetricField() = default;
  /// `value` is an optional fast path for order-0 evaluation.
  explicit MetricField(JetFn jet, ValueFn value = nullptr, std::string label = "metric");

  static MetricField constant(const Mat3d& m, std::string label = "constant");

  /// Components as jets of the given order at p.
  JetMat jet(const Vec3d& p, int order) const;
  Mat3d operator()(const Vec3d& p) const;
  const std::string& label() const { return label_; }
  bool valid() const { return static_cast<bool>(jet_); }

 private:
  JetFn jet_;
  ValueFn value_;
  std::string label_;
};

/// (1 - t) a + t b componentwise.
MetricField blend(const MetricField& a, const MetricField& b, double t);

}  // namespace rr::contact
