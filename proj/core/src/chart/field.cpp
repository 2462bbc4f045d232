#include "rr/chart/field.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "rr/errors.hpp"

namespace rr::chart {

const char* backend_name(Backend b) { return b == Backend::Analytic ? "analytic" : "finite_difference"; }

namespace {

// Second-order central stencils for derivatives of order 0..4 as (offset, weight) pairs.
const std::vector<std::pair<int, double>>& stencil(int n) {
  static const std::array<std::vector<std::pair<int, double>>, 5> s{{
      {{0, 1.0}},
      {{-1, -0.5}, {1, 0.5}},
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
      {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
  }};
  return s[static_cast<std::size_t>(n)];
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

FdEstimate fd_taylor(const std::function<double(const Vec3d&)>& f, const Vec3d& p, int order, const FdOptions& opts) {
  if (order < 0 || order > kMaxJetOrder) throw InvalidInput("jet order must be in [0, 4]");
  if (!(opts.step > 0.0)) throw InvalidInput("finite-difference step must be positive");

  // Samples keyed by (step level, offsets); offsets are in units of the level's step.
  std::unordered_map<long long, double> cache;
  auto sample = [&](int level, double h, int i, int j, int k) {
    const long long key = ((static_cast<long long>(level) * 16 + (i + 4)) * 16 + (j + 4)) * 16 + (k + 4);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = f({p[0] + i * h, p[1] + j * h, p[2] + k * h});
    if (!std::isfinite(v)) throw ComputationError("non-finite sample at " + format_point(p));
    cache.emplace(key, v);
    return v;
  };

  FdEstimate out;
  out.jet = Jet::zero(order);
  out.jet.coeff(0) = sample(0, 0.0, 0, 0, 0);
  for (int m = 1; m < jet_size(order); ++m) {
    const auto e = Jet::monomial(m);
    const int deg = e[0] + e[1] + e[2];
    static const double kStepScale[] = {1.0, 1.0, 10.0, 30.0, 100.0};
    const double scale = kStepScale[deg];
    const double h = opts.step * scale;
    double d[2] = {0.0, 0.0};
    for (int half = 0; half < 2; ++half) {
      const double hh = half ? 0.5 * h : h;
      const int level = 2 * deg + half;
      double acc = 0.0;
      for (const auto& [i, wi] : stencil(e[0]))
        for (const auto& [j, wj] : stencil(e[1]))
          for (const auto& [k, wk] : stencil(e[2])) acc += wi * wj * wk * sample(level, hh, i, j, k);
      d[half] = acc / std::pow(hh, deg);
    }
    const double rich = (4.0 * d[1] - d[0]) / 3.0;
    const double diff = std::fabs(d[1] - d[0]);
    out.error = std::fmax(out.error, diff);
    if (diff > opts.tolerance * scale * scale * std::fmax(1.0, std::fabs(rich))) {
      std::ostringstream os;
      os << "finite-difference estimates disagree at " << format_point(p) << " for derivative (" << e[0] << ","
         << e[1] << "," << e[2] << "): " << d[0] << " vs " << d[1];
      throw ComputationError(os.str());
    }
    out.jet.coeff(m) = rich / (factorial(e[0]) * factorial(e[1]) * factorial(e[2]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expression nodes

struct ScalarField::Node {
  virtual ~Node() = default;
  virtual double value(const Vec3d& p) const = 0;
  virtual Jet jet(const JetVec& p) const = 0;
  virtual bool analytic() const { return true; }
  virtual bool constant(double* v) const {
    (void)v;
    return false;
  }
  virtual void print(std::ostream& os) const = 0;
};

namespace {

using Node = ScalarField::Node;
using NodePtr = std::shared_ptr<const Node>;

struct ConstNode final : Node {
  double c;
  explicit ConstNode(double v) : c(v) {}
  double value(const Vec3d&) const override { return c; }
  Jet jet(const JetVec&) const override { return Jet(c); }
  bool constant(double* v) const override {
    if (v) *v = c;
    return true;
  }
  void print(std::ostream& os) const override { os << c; }
};

struct CoordNode final : Node {
  int axis;
  explicit CoordNode(int a) : axis(a) {}
  double value(const Vec3d& p) const override { return p[static_cast<std::size_t>(axis)]; }
  Jet jet(const JetVec& p) const override { return p[static_cast<std::size_t>(axis)]; }
  void print(std::ostream& os) const override { os << "xyz"[axis]; }
};

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, PowConst };

struct UnaryNode final : Node {
  UnaryOp op;
  NodePtr a;
  double p = 0.0;
  UnaryNode(UnaryOp o, NodePtr arg, double power = 0.0) : op(o), a(std::move(arg)), p(power) {}

  double value(const Vec3d& x) const override {
    const double v = a->value(x);
    switch (op) {
      case UnaryOp::Neg: return -v;
      case UnaryOp::Sin: return std::sin(v);
      case UnaryOp::Cos: return std::cos(v);
      case UnaryOp::Exp: return std::exp(v);
      case UnaryOp::Log: return std::log(v);
      case UnaryOp::Sqrt: return std::sqrt(v);
      case UnaryOp::PowConst: return std::pow(v, p);
    }
    return 0.0;
  }
  Jet jet(const JetVec& x) const override {
    const Jet v = a->jet(x);
    switch (op) {
      case UnaryOp::Neg: return -v;
      case UnaryOp::Sin: return rr::sin(v);
      case UnaryOp::Cos: return rr::cos(v);
      case UnaryOp::Exp: return rr::exp(v);
      case UnaryOp::Log: return rr::log(v);
      case UnaryOp::Sqrt: return rr::sqrt(v);
      case UnaryOp::PowConst: {
        if (p == std::round(p) && p >= 0.0 && p <= 8.0) {
          Jet r(1.0);
          for (int i = 0; i < static_cast<int>(p); ++i) r = r * v;
          return r;
        }
        return rr::pow(v, p);
      }
    }
    return Jet(0.0);
  }
  bool analytic() const override { return a->analytic(); }
  void print(std::ostream& os) const override {
    static const char* names[] = {"-", "sin", "cos", "exp", "log", "sqrt", "pow"};
    os << names[static_cast<int>(op)] << "(";
    a->print(os);
    if (op == UnaryOp::PowConst) os << ", " << p;
    os << ")";
  }
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct BinaryNode final : Node {
  BinaryOp op;
  NodePtr a, b;
  BinaryNode(BinaryOp o, NodePtr l, NodePtr r) : op(o), a(std::move(l)), b(std::move(r)) {}

  double value(const Vec3d& x) const override {
    const double u = a->value(x);
    const double v = b->value(x);
    switch (op) {
      case BinaryOp::Add: return u + v;
      case BinaryOp::Sub: return u - v;
      case BinaryOp::Mul: return u * v;
      case BinaryOp::Div: return u / v;
      case BinaryOp::Pow: return std::pow(u, v);
    }
    return 0.0;
  }
  Jet jet(const JetVec& x) const override {
    const Jet u = a->jet(x);
    const Jet v = b->jet(x);
    switch (op) {
      case BinaryOp::Add: return u + v;
      case BinaryOp::Sub: return u - v;
      case BinaryOp::Mul: return u * v;
      case BinaryOp::Div: return u / v;
      case BinaryOp::Pow: return rr::exp(v * rr::log(u));
    }
    return Jet(0.0);
  }
  bool analytic() const override { return a->analytic() && b->analytic(); }
  void print(std::ostream& os) const override {
    static const char* ops[] = {" + ", " - ", " * ", " / ", " ^ "};
    os << "(";
    a->print(os);
    os << ops[static_cast<int>(op)];
    b->print(os);
    os << ")";
  }
};

struct SubstituteNode final : Node {
  NodePtr f;
  std::array<NodePtr, 3> c;
  SubstituteNode(NodePtr fn, std::array<NodePtr, 3> coords) : f(std::move(fn)), c(std::move(coords)) {}
  double value(const Vec3d& x) const override { return f->value({c[0]->value(x), c[1]->value(x), c[2]->value(x)}); }
  Jet jet(const JetVec& x) const override { return f->jet({c[0]->jet(x), c[1]->jet(x), c[2]->jet(x)}); }
  bool analytic() const override { return f->analytic() && c[0]->analytic() && c[1]->analytic() && c[2]->analytic(); }
  void print(std::ostream& os) const override {
    f->print(os);
    os << " o (";
    for (int i = 0; i < 3; ++i) {
      if (i) os << ", ";
      c[static_cast<std::size_t>(i)]->print(os);
    }
    os << ")";
  }
};

struct SourceNode final : Node {
  std::shared_ptr<const TaylorSource> src;
  bool exact_derivatives;
  SourceNode(std::shared_ptr<const TaylorSource> s, bool exact) : src(std::move(s)), exact_derivatives(exact) {}
  double value(const Vec3d& x) const override { return src->value(x); }
  Jet jet(const JetVec& x) const override {
    const int order = jet_order(x);
    const Vec3d p0 = values(x);
    if (order < 0) return Jet(src->value(p0));
    if (order > src->max_order()) {
      throw ComputationError(src->describe() + " supports jets up to order " + std::to_string(src->max_order()));
    }
    return compose(src->taylor(p0, order), x);
  }
  bool analytic() const override { return exact_derivatives; }
  void print(std::ostream& os) const override { os << src->describe(); }
};

class SampledSource final : public TaylorSource {
 public:
  SampledSource(std::function<double(const Vec3d&)> f, std::string label, FdOptions opts)
      : f_(std::move(f)), label_(std::move(label)), opts_(opts) {}
  double value(const Vec3d& p) const override { return f_(p); }
  Jet taylor(const Vec3d& p, int order) const override { return fd_taylor(f_, p, order, opts_).jet; }
  std::string describe() const override { return label_; }

 private:
  std::function<double(const Vec3d&)> f_;
  std::string label_;
  FdOptions opts_;
};

bool is_const(const NodePtr& n, double* v = nullptr) { return n->constant(v); }

ScalarField make_binary(BinaryOp op, const ScalarField& a, const ScalarField& b) {
  double ca = 0.0, cb = 0.0;
  const bool ka = is_const(a.node(), &ca);
  const bool kb = is_const(b.node(), &cb);
  if (ka && kb) {
    switch (op) {
      case BinaryOp::Add: return ScalarField(ca + cb);
      case BinaryOp::Sub: return ScalarField(ca - cb);
      case BinaryOp::Mul: return ScalarField(ca * cb);
      case BinaryOp::Div: return ScalarField(ca / cb);
      case BinaryOp::Pow: return ScalarField(std::pow(ca, cb));
    }
  }
  // Constant folding only; no algebraic rewriting beyond the units.
  switch (op) {
    case BinaryOp::Add:
      if (ka && ca == 0.0) return b;
      if (kb && cb == 0.0) return a;
      break;
    case BinaryOp::Sub:
      if (kb && cb == 0.0) return a;
      if (ka && ca == 0.0) return -b;
      break;
    case BinaryOp::Mul:
      if ((ka && ca == 0.0) || (kb && cb == 0.0)) return ScalarField(0.0);
      if (ka && ca == 1.0) return b;
      if (kb && cb == 1.0) return a;
      break;
    case BinaryOp::Div:
      if (ka && ca == 0.0) return ScalarField(0.0);
      if (kb && cb == 1.0) return a;
      break;
    case BinaryOp::Pow:
      if (kb) return pow(a, cb);
      break;
  }
  return ScalarField(std::make_shared<BinaryNode>(op, a.node(), b.node()));
}

ScalarField make_unary(UnaryOp op, const ScalarField& a, double p = 0.0) {
  double c = 0.0;
  if (is_const(a.node(), &c)) return ScalarField(UnaryNode(op, a.node(), p).value({0, 0, 0}));
  return ScalarField(std::make_shared<UnaryNode>(op, a.node(), p));
}

}  // namespace

ScalarField::ScalarField() : node_(std::make_shared<ConstNode>(0.0)) {}
ScalarField::ScalarField(double constant) : node_(std::make_shared<ConstNode>(constant)) {}

ScalarField ScalarField::coordinate(int axis) {
  if (axis < 0 || axis > 2) throw InvalidInput("coordinate axis must be 0, 1 or 2");
  return ScalarField(std::make_shared<CoordNode>(axis));
}

ScalarField ScalarField::from_source(std::shared_ptr<const TaylorSource> source) {
  return ScalarField(std::make_shared<SourceNode>(std::move(source), true));
}

ScalarField ScalarField::sampled(std::function<double(const Vec3d&)> f, std::string label, FdOptions opts) {
  return ScalarField(
      std::make_shared<SourceNode>(std::make_shared<SampledSource>(std::move(f), std::move(label), opts), false));
}

double ScalarField::operator()(const Vec3d& p) const { return node_->value(p); }
Jet ScalarField::operator()(const JetVec& p) const { return node_->jet(p); }

bool ScalarField::is_constant() const { return node_->constant(nullptr); }

double ScalarField::constant_value() const {
  double v = 0.0;
  node_->constant(&v);
  return v;
}

bool ScalarField::analytic() const { return node_->analytic(); }

std::string ScalarField::to_string() const {
  std::ostringstream os;
  node_->print(os);
  return os.str();
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) { return make_binary(BinaryOp::Add, a, b); }
ScalarField operator-(const ScalarField& a, const ScalarField& b) { return make_binary(BinaryOp::Sub, a, b); }
ScalarField operator*(const ScalarField& a, const ScalarField& b) { return make_binary(BinaryOp::Mul, a, b); }
ScalarField operator/(const ScalarField& a, const ScalarField& b) { return make_binary(BinaryOp::Div, a, b); }
ScalarField operator-(const ScalarField& a) { return make_unary(UnaryOp::Neg, a); }
ScalarField sin(const ScalarField& a) { return make_unary(UnaryOp::Sin, a); }
ScalarField cos(const ScalarField& a) { return make_unary(UnaryOp::Cos, a); }
ScalarField exp(const ScalarField& a) { return make_unary(UnaryOp::Exp, a); }
ScalarField log(const ScalarField& a) { return make_unary(UnaryOp::Log, a); }
ScalarField sqrt(const ScalarField& a) { return make_unary(UnaryOp::Sqrt, a); }

ScalarField pow(const ScalarField& a, double p) {
  if (p == 1.0) return a;
  if (p == 0.0) return ScalarField(1.0);
  return make_unary(UnaryOp::PowConst, a, p);
}

ScalarField pow(const ScalarField& a, const ScalarField& b) { return make_binary(BinaryOp::Pow, a, b); }

ScalarField substitute(const ScalarField& f, const std::array<ScalarField, 3>& coords) {
  if (f.is_constant()) return f;
  return ScalarField(std::make_shared<SubstituteNode>(
      f.node(), std::array<NodePtr, 3>{coords[0].node(), coords[1].node(), coords[2].node()}));
}

namespace {

Vec3d checked_point(const Vec3d& p, const ChartDomain* dom) {
  if (!dom) return p;
  if (!dom->contains(p)) throw InvalidInput("point " + format_point(p) + " lies outside the chart bounds");
  return dom->wrap(p);
}

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) throw InvalidInput("jet order must be in [0, 4]");
}

}  // namespace

Jet evaluate_jet(const ScalarField& f, const Vec3d& p, int order, Backend backend, const ChartDomain* dom,
                 const FdOptions& fd) {
  check_order(order);
  const Vec3d q = checked_point(p, dom);
  if (backend == Backend::FiniteDifference) {
    return fd_taylor([&f](const Vec3d& x) { return f(x); }, q, order, fd).jet;
  }
  Jet r = f(seed_point(q, order));
  if (r.exact()) {
    Jet z = Jet::zero(order);
    z.coeff(0) = r.value();
    return z;
  }
  return r;
}

JetVec evaluate_jet(const VectorField& v, const Vec3d& p, int order, Backend backend, const ChartDomain* dom,
                    const FdOptions& fd) {
  return {evaluate_jet(v[0], p, order, backend, dom, fd), evaluate_jet(v[1], p, order, backend, dom, fd),
          evaluate_jet(v[2], p, order, backend, dom, fd)};
}

Vec3d evaluate(const VectorField& v, const Vec3d& p) { return {v[0](p), v[1](p), v[2](p)}; }

}  // namespace rr::chart
