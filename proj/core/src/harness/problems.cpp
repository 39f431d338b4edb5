#include "trigrid/harness/problems.hpp"

#include <cmath>
#include <numbers>

namespace trigrid {

namespace {

constexpr double kLayerSharpness = 60.0;
constexpr double kLayerRadius = std::numbers::pi / 3.0;

}  // namespace

ManufacturedProblem manufactured_problem(const std::string& id) {
  ManufacturedProblem p;
  p.id = id;
  if (id == "cos-x3") {
    p.u = [](const Vec3& x) { return std::cos(x[2]); };
    p.grad_u = [](const Vec3& x) { return Vec3(0.0, 0.0, -std::sin(x[2])); };
    p.f = [](const Vec3& x) { return std::cos(x[2]); };
  } else if (id == "internal-layer") {
    p.u = [](const Vec3& x) { return std::atan(kLayerSharpness * (x.norm() - kLayerRadius)); };
    p.grad_u = [](const Vec3& x) {
      const double r = x.norm();
      if (r == 0.0) return Vec3(Vec3::Zero());
      const double s = kLayerSharpness * (r - kLayerRadius);
      return Vec3(kLayerSharpness / (1.0 + s * s) / r * x);
    };
    p.f = [](const Vec3& x) {
      const double r = std::max(x.norm(), 1e-12);
      const double s = kLayerSharpness * (r - kLayerRadius);
      const double q = 1.0 + s * s;
      const double du = kLayerSharpness / q;
      const double d2u = -2.0 * kLayerSharpness * kLayerSharpness * s / (q * q);
      return -(d2u + 2.0 * du / r);
    };
  } else if (id == "linear") {
    p.u = [](const Vec3& x) { return 1.0 + x[0] + 2.0 * x[1] - 3.0 * x[2]; };
    p.grad_u = [](const Vec3&) { return Vec3(1.0, 2.0, -3.0); };
    p.f = [](const Vec3&) { return 0.0; };
  } else if (id == "quadratic") {
    p.u = [](const Vec3& x) { return x[0] * x[0] + x[1] * x[2] - 0.5 * x[2] * x[2] + x[0]; };
    p.grad_u = [](const Vec3& x) { return Vec3(2.0 * x[0] + 1.0, x[2], x[1] - x[2]); };
    p.f = [](const Vec3&) { return -1.0; };
  } else {
    throw ConfigError("unknown manufactured problem '" + id + "'");
  }
  return p;
}

}  // namespace trigrid
