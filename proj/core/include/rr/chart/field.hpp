#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rr/chart/domain.hpp"
#include "rr/jet.hpp"
#include "rr/tensor.hpp"

namespace rr::chart {

/// Where partial derivatives come from.
enum class Backend { Analytic, FiniteDifference };

const char* backend_name(Backend b);

/// Central differences with one Richardson level; the h and h/2 estimates must agree.
struct FdOptions {
  double step = 1e-4;        // used for first derivatives
  double tolerance = 1e-5;   // relative disagreement allowed between the h and h/2 estimates
};

struct FdEstimate {
  Jet jet;
  double error = 0.0;  // largest |D(h) - D(h/2)| over the computed coefficients
};

/// Taylor jet of a black-box function by tensor-product central stencils.
///
/// Derivatives of total order 2, 3 and 4 use steps 10x, 30x and 100x larger than
/// `opts.step` so the roundoff stays comparable to the Richardson truncation error.
/// The agreement tolerance scales with the square of that factor.
/// Throws ComputationError when the two step sizes disagree beyond tolerance.
FdEstimate fd_taylor(const std::function<double(const Vec3d&)>& f, const Vec3d& p, int order,
                     const FdOptions& opts = {});

/// Extension point for fields whose Taylor data come from somewhere other than
/// an expression tree (ODE solutions, splines, sampled data).
class TaylorSource {
 public:
  virtual ~TaylorSource() = default;
  virtual double value(const Vec3d& p) const = 0;
  /// Taylor jet about p with the given order, identity-seeded in the chart coordinates.
  virtual Jet taylor(const Vec3d& p, int order) const = 0;
  virtual int max_order() const { return kMaxJetOrder; }
  virtual std::string describe() const { return "custom"; }
};

class ScalarField {
 public:
  struct Node;

  ScalarField();
  ScalarField(double constant);  // NOLINT(google-explicit-constructor)

  static ScalarField coordinate(int axis);
  static ScalarField from_source(std::shared_ptr<const TaylorSource> source);
  /// Black-box field differentiated by finite differences.
  static ScalarField sampled(std::function<double(const Vec3d&)> f, std::string label = "sampled",
                             FdOptions opts = {});

  double operator()(const Vec3d& p) const;
  /// Value at a jet-valued point; the order is that of the point.
  Jet operator()(const JetVec& p) const;

  bool is_constant() const;
  double constant_value() const;  // only meaningful when is_constant()
  /// True when every leaf has exact derivatives (no sampled nodes).
  bool analytic() const;
  std::string to_string() const;

  const std::shared_ptr<const Node>& node() const { return node_; }
  explicit ScalarField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const Node> node_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField sin(const ScalarField& a);
ScalarField cos(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField sqrt(const ScalarField& a);
ScalarField pow(const ScalarField& a, double p);
ScalarField pow(const ScalarField& a, const ScalarField& b);

/// Substitutes the coordinates of `f` by the given fields.
ScalarField substitute(const ScalarField& f, const std::array<ScalarField, 3>& coords);

using VectorField = std::array<ScalarField, 3>;
using OneForm = std::array<ScalarField, 3>;

/// Jet of a field at a point.
///
/// Analytic mode propagates exact Taylor coefficients through the expression.
/// Finite-difference mode treats the field as a black box and differentiates its values.
/// When `dom` is given the point is wrapped on periodic axes and must lie inside the bounds.
Jet evaluate_jet(const ScalarField& f, const Vec3d& p, int order, Backend backend = Backend::Analytic,
                 const ChartDomain* dom = nullptr, const FdOptions& fd = {});

JetVec evaluate_jet(const VectorField& v, const Vec3d& p, int order, Backend backend = Backend::Analytic,
                    const ChartDomain* dom = nullptr, const FdOptions& fd = {});

Vec3d evaluate(const VectorField& v, const Vec3d& p);

}  // namespace rr::chart
