#pragma once

#include "trigrid/common.hpp"

namespace trigrid {

// Scalar implicit field, positive inside the domain and negative outside.
class ImplicitField {
 public:
  virtual ~ImplicitField() = default;

  virtual double value(const Vec3& x) const = 0;
  virtual Vec3 gradient(const Vec3& x) const = 0;

  // Sampling resolution of the representation; 0 for closed-form fields.
  virtual double resolution() const { return 0.0; }
};

// Unit normal grad(phi)/|grad(phi)|. Points toward increasing phi, i.e. into
// the domain. Throws GeometryError when the gradient vanishes (medial axis,
// clamped region outside the band).
Vec3 unit_normal(const ImplicitField& field, const Vec3& x, double min_gradient = 1e-10);

}  // namespace trigrid
