#pragma once

#include "trigrid/fem/assembly.hpp"
#include "trigrid/fem/solution.hpp"
#include "trigrid/octree/classify.hpp"
#include "trigrid/sdf/analytic.hpp"
#include "trigrid/sdf/surface.hpp"

#include <memory>
#include <random>

namespace trigrid::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec3 uniform_point(const Box3& box) {
  return Vec3(uniform(box.lo[0], box.hi[0]), uniform(box.lo[1], box.hi[1]), uniform(box.lo[2], box.hi[2]));
}

// Ray-parity point-in-mesh test along a slightly skewed ray.
inline bool inside_by_parity(const TriangleSurface& s, const Vec3& p) {
  const Vec3 dir = Vec3(1.0, 0.0123, 0.0071).normalized();
  int hits = 0;
  for (const auto& t : s.triangles) {
    const Vec3& a = s.vertices[t[0]];
    const Vec3 e1 = s.vertices[t[1]] - a;
    const Vec3 e2 = s.vertices[t[2]] - a;
    const Vec3 q = dir.cross(e2);
    const double det = e1.dot(q);
    if (std::abs(det) < 1e-14) continue;
    const Vec3 d = p - a;
    const double u = d.dot(q) / det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 r = d.cross(e1);
    const double v = dir.dot(r) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    if (e2.dot(r) / det > 0.0) ++hits;
  }
  return hits % 2 == 1;
}

// Classified grid over a cubic box with everything needed to assemble.
struct Discrete {
  FeGrid grid;
  std::unique_ptr<CutCellQuadrature> quad;
  std::unique_ptr<LagrangeBasis> basis;
  std::unique_ptr<DofMap> dofs;
  std::unique_ptr<ConstraintMap> constraints;

  // `degree` > 0 overrides the default volume and surface exactness 2p.
  Discrete(FeGrid g, const ImplicitField& phi, int p, int r_q, bool stabilize = true, int degree = 0)
      : grid(std::move(g)) {
    CutQuadOptions q;
    q.r_q = r_q;
    const QuadratureDegrees degrees = degree > 0 ? QuadratureDegrees{degree, degree} : QuadratureDegrees::for_order(p);
    quad = std::make_unique<CutCellQuadrature>(grid, phi, q, degrees);
    basis = std::make_unique<LagrangeBasis>(p);
    dofs = std::make_unique<DofMap>(grid, *basis);
    ConstraintOptions c;
    c.stabilize = stabilize;
    constraints = std::make_unique<ConstraintMap>(build_constraints(grid, *dofs, *basis, *quad, c));
  }
};

// Uniform grid at `level` over `box`, classified against phi.
inline FeGrid uniform_grid(const Box3& box, int level, const ImplicitField& phi, double h_sample = 0.0) {
  FeGrid g = FeGrid::build_base(box, level);
  ClassifyOptions o;
  o.h_sample = h_sample;
  classify(g, phi, o);
  return g;
}

}  // namespace trigrid::test
