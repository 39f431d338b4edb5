#pragma once

#include "trigrid/sdf/surface.hpp"

#include <vector>

namespace trigrid {

enum class TriangleFeature { Face, Edge, Vertex };

struct ClosestPoint {
  double distance = 0.0;
  Vec3 point = Vec3::Zero();
  int triangle = -1;
  TriangleFeature feature = TriangleFeature::Face;
  int feature_index = 0;  // local edge (0: v0v1, 1: v1v2, 2: v2v0) or vertex
};

// Closest point on triangle (a, b, c) to p with the Voronoi feature it lies on.
ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Exact point-to-mesh distance over an AABB tree, with the sign taken from
// angle-weighted pseudonormals at the closest feature.
class TriangleMeshDistance {
 public:
  explicit TriangleMeshDistance(const TriangleSurface& surface);

  ClosestPoint closest(const Vec3& p) const;

  // Positive inside. Throws GeometryError when the closest feature is an
  // open or non-manifold edge, where the sign is undefined.
  double signed_distance(const Vec3& p) const;

  const TriangleSurface& surface() const { return surface_; }

 private:
  struct Node {
    Box3 box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };

  int build(int first, int count, int depth);

  TriangleSurface surface_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  std::vector<Vec3> vertex_normals_;
  // Per triangle and local edge; zero vector marks an edge that does not
  // have exactly two incident triangles.
  std::vector<std::array<Vec3, 3>> edge_normals_;
  std::vector<char> vertex_on_open_edge_;
};

}  // namespace trigrid
