#include "rr/contact/metric.hpp"

#include "rr/errors.hpp"

namespace rr::contact {

MetricField::MetricField(JetFn jet, ValueFn value, std::string label)
    : jet_(std::move(jet)), value_(std::move(value)), label_(std::move(label)) {}

MetricField MetricField::constant(const Mat3d& m, std::string label) {
  return MetricField(
      [m](const Vec3d&, int order) {
        JetMat r;
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) {
            r[i][j] = Jet::zero(order);
            r[i][j].coeff(0) = m[i][j];
          }
        return r;
      },
      [m](const Vec3d&) { return m; }, std::move(label));
}

JetMat MetricField::jet(const Vec3d& p, int order) const {
  if (!jet_) throw InvalidInput("metric field is empty");
  return jet_(p, order);
}

Mat3d MetricField::operator()(const Vec3d& p) const {
  if (value_) return value_(p);
  return values(jet(p, 0));
}

MetricField blend(const MetricField& a, const MetricField& b, double t) {
  return MetricField(
      [a, b, t](const Vec3d& p, int order) {
        const JetMat ja = a.jet(p, order), jb = b.jet(p, order);
        JetMat r;
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) r[i][j] = (1.0 - t) * ja[i][j] + t * jb[i][j];
        return r;
      },
      [a, b, t](const Vec3d& p) { return (1.0 - t) * a(p) + t * b(p); }, "blend");
}

}  // namespace rr::contact
