#pragma once

#include "trigrid/common.hpp"

#include <functional>
#include <string>

namespace trigrid {

// Manufactured solution of -laplace(u) = f with its exact gradient.
struct ManufacturedProblem {
  std::string id;
  std::function<double(const Vec3&)> u;
  std::function<Vec3(const Vec3&)> grad_u;
  std::function<double(const Vec3&)> f;
};

// "cos-x3": u = cos(z).
// "internal-layer": u = atan(60 (r - pi/3)), r = |x|.
// "linear": u = 1 + x + 2y - 3z.
// "quadratic": u = x^2 + y z - z^2 / 2 + x.
// Throws ConfigError for unknown ids.
ManufacturedProblem manufactured_problem(const std::string& id);

}  // namespace trigrid
