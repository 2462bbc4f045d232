#pragma once

#include <stdexcept>
#include <string>

#include "rr/tensor.hpp"

namespace rr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration, malformed expression, or a violated precondition on inputs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical computation could not be completed (singular system, FD disagreement, ...).
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// A prescribed function exceeds the curvature ceiling theta'^2 / 2.
class AdmissibilityError : public InvalidInput {
 public:
  AdmissibilityError(const std::string& what, const Vec3d& point, double value, double ceiling)
      : InvalidInput(what), point_(point), value_(value), ceiling_(ceiling) {}

  const Vec3d& point() const { return point_; }
  double value() const { return value_; }
  double ceiling() const { return ceiling_; }

 private:
  Vec3d point_;
  double value_;
  double ceiling_;
};

std::string format_point(const Vec3d& p);

}  // namespace rr
