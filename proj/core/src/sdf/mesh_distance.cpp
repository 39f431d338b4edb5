#include "trigrid/sdf/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace trigrid {

ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi region walk after Ericson, "Real-Time Collision Detection" 5.1.5.
  ClosestPoint r;
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    r.point = a;
    r.feature = TriangleFeature::Vertex;
    r.feature_index = 0;
  } else {
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    const double vc = d1 * d4 - d3 * d2;
    const double vb = d5 * d2 - d1 * d6;
    const double va = d3 * d6 - d5 * d4;
    if (d3 >= 0.0 && d4 <= d3) {
      r.point = b;
      r.feature = TriangleFeature::Vertex;
      r.feature_index = 1;
    } else if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
      r.point = a + (d1 / (d1 - d3)) * ab;
      r.feature = TriangleFeature::Edge;
      r.feature_index = 0;
    } else if (d6 >= 0.0 && d5 <= d6) {
      r.point = c;
      r.feature = TriangleFeature::Vertex;
      r.feature_index = 2;
    } else if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
      r.point = a + (d2 / (d2 - d6)) * ac;
      r.feature = TriangleFeature::Edge;
      r.feature_index = 2;
    } else if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
      r.point = b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
      r.feature = TriangleFeature::Edge;
      r.feature_index = 1;
    } else {
      const double denom = 1.0 / (va + vb + vc);
      r.point = a + ab * (vb * denom) + ac * (vc * denom);
      r.feature = TriangleFeature::Face;
    }
  }
  r.distance = (p - r.point).norm();
  return r;
}

namespace {

double box_distance_sq(const Box3& b, const Vec3& p) {
  const Vec3 d = (b.lo - p).cwiseMax(0.0).cwiseMax(p - b.hi);
  return d.squaredNorm();
}

}  // namespace

TriangleMeshDistance::TriangleMeshDistance(const TriangleSurface& surface) : surface_(surface) {
  if (surface_.triangles.empty()) throw GeometryError("empty triangle surface");
  if (surface_.normals.size() != surface_.triangles.size()) surface_.recompute_normals();

  const auto& V = surface_.vertices;
  const auto& T = surface_.triangles;
  vertex_normals_.assign(V.size(), Vec3::Zero());
  for (std::size_t t = 0; t < T.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 e1 = (V[T[t][(k + 1) % 3]] - V[T[t][k]]).normalized();
      const Vec3 e2 = (V[T[t][(k + 2) % 3]] - V[T[t][k]]).normalized();
      const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
      vertex_normals_[T[t][k]] += angle * surface_.normals[t];
    }
  }

  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (std::size_t t = 0; t < T.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = T[t][k];
      const int b = T[t][(k + 1) % 3];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
    }
  }
  edge_normals_.assign(T.size(), {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
  vertex_on_open_edge_.assign(V.size(), 0);
  for (std::size_t t = 0; t < T.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = T[t][k];
      const int b = T[t][(k + 1) % 3];
      const auto& faces = edge_faces[{std::min(a, b), std::max(a, b)}];
      if (faces.size() == 2) {
        edge_normals_[t][k] = surface_.normals[faces[0]] + surface_.normals[faces[1]];
      } else {
        vertex_on_open_edge_[a] = 1;
        vertex_on_open_edge_[b] = 1;
      }
    }
  }

  order_.resize(T.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * T.size());
  build(0, static_cast<int>(T.size()), 0);
}

int TriangleMeshDistance::build(int first, int count, int depth) {
  const auto& V = surface_.vertices;
  const auto& T = surface_.triangles;
  Node node;
  node.first = first;
  node.count = count;
  node.box.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.box.hi = -node.box.lo;
  for (int i = first; i < first + count; ++i) {
    for (int k = 0; k < 3; ++k) {
      node.box.lo = node.box.lo.cwiseMin(V[T[order_[i]][k]]);
      node.box.hi = node.box.hi.cwiseMax(V[T[order_[i]][k]]);
    }
  }
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (count <= 4 || depth > 60) return index;

  int axis = 0;
  const Vec3 ext = node.box.extent();
  if (ext[1] > ext[axis]) axis = 1;
  if (ext[2] > ext[axis]) axis = 2;
  auto centroid = [&](int t) { return (V[T[t][0]][axis] + V[T[t][1]][axis] + V[T[t][2]][axis]); };
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) { return centroid(a) < centroid(b); });
  const int left = build(first, mid - first, depth + 1);
  const int right = build(mid, first + count - mid, depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

ClosestPoint TriangleMeshDistance::closest(const Vec3& p) const {
  const auto& V = surface_.vertices;
  const auto& T = surface_.triangles;
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_sq = best.distance;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance_sq(node.box, p) > best_sq) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order_[i];
        ClosestPoint c = closest_point_on_triangle(p, V[T[t][0]], V[T[t][1]], V[T[t][2]]);
        const double sq = c.distance * c.distance;
        if (sq < best_sq) {
          best_sq = sq;
          best = c;
          best.triangle = t;
        }
      }
      continue;
    }
    const double dl = box_distance_sq(nodes_[node.left].box, p);
    const double dr = box_distance_sq(nodes_[node.right].box, p);
    // Push the farther child first so the nearer one is visited next.
    if (dl < dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

double TriangleMeshDistance::signed_distance(const Vec3& p) const {
  const ClosestPoint c = closest(p);
  if (c.distance == 0.0) return 0.0;
  const auto& tri = surface_.triangles[c.triangle];
  Vec3 pseudo;
  switch (c.feature) {
    case TriangleFeature::Face:
      pseudo = surface_.normals[c.triangle];
      break;
    case TriangleFeature::Edge:
      pseudo = edge_normals_[c.triangle][c.feature_index];
      if (pseudo.squaredNorm() == 0.0) {
        throw GeometryError("ambiguous sign near open or non-manifold edge at node " +
                            format_point(p));
      }
      break;
    case TriangleFeature::Vertex:
      if (vertex_on_open_edge_[tri[c.feature_index]]) {
        throw GeometryError("ambiguous sign near open or non-manifold vertex at node " +
                            format_point(p));
      }
      pseudo = vertex_normals_[tri[c.feature_index]];
      break;
  }
  const double s = (p - c.point).dot(pseudo);
  if (s == 0.0) {
    throw GeometryError("ambiguous sign (tangential offset) at node " + format_point(p));
  }
  return s < 0.0 ? c.distance : -c.distance;
}

}  // namespace trigrid
