#pragma once

#include "trigrid/sdf/field.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace trigrid {

// Closed-form signed distance field built from primitives and CSG combinators.
//
// Primitives return exact signed distances (positive inside). Union and
// intersection are the pointwise max and min of their operands, difference
// is min(a, -b); the results keep the sign convention and stay 1-Lipschitz
// but are only distance bounds away from the zero set.
class AnalyticSdf final : public ImplicitField {
 public:
  struct Node;

  static AnalyticSdf sphere(const Vec3& center, double radius);
  static AnalyticSdf box(const Vec3& lo, const Vec3& hi);
  // Finite cylinder around `axis` through `center`, extending half_length
  // to either side.
  static AnalyticSdf cylinder(const Vec3& center, const Vec3& axis, double radius,
                              double half_length);
  // phi(x) = offset - normal . x
  static AnalyticSdf half_space(const Vec3& normal, double offset);

  static AnalyticSdf csg_union(const AnalyticSdf& a, const AnalyticSdf& b);
  static AnalyticSdf csg_intersection(const AnalyticSdf& a, const AnalyticSdf& b);
  static AnalyticSdf csg_difference(const AnalyticSdf& a, const AnalyticSdf& b);

  // Parses expressions such as
  //   difference(box(-1,-1,-1,1,1,1), cylinder(0,0,0, 0,0,1, 0.3, 2))
  // Primitives: sphere(cx,cy,cz,r), box(x0,y0,z0,x1,y1,z1),
  // cylinder(cx,cy,cz,ax,ay,az,r,half_length), halfspace(nx,ny,nz,c).
  static AnalyticSdf parse(std::string_view expression);

  // Named shapes: "sphere" (unit sphere at the origin), "unit-cube" ([0,1]^3),
  // "handle-block" (box joined with three cylinders).
  static AnalyticSdf named(std::string_view name);

  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;

  // Value and gradient in one traversal.
  double evaluate(const Vec3& x, Vec3* grad) const;

  // Conservative bounding box of the positive region, if bounded.
  Box3 bounds() const;

  const std::string& description() const { return description_; }

 private:
  AnalyticSdf(std::shared_ptr<const Node> root, std::string description);

  std::shared_ptr<const Node> root_;
  std::string description_;
};

}  // namespace trigrid
