#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace trigrid {

using Vec3 = Eigen::Vector3d;

// Axis-aligned box, closed on both ends.
struct Box3 {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return extent().norm(); }
  bool contains(const Vec3& x, double tol = 0.0) const {
    return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
  }
  Box3 expanded(double margin) const {
    return {lo - Vec3::Constant(margin), hi + Vec3::Constant(margin)};
  }
};

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid geometry input or evaluation outside the represented region.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Linear solver breakdown or non-convergence; the CLI maps it to exit code 3.
class SolverError : public Error {
 public:
  using Error::Error;
};

std::string format_point(const Vec3& x);

}  // namespace trigrid
