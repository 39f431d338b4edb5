#include "trigrid/sdf/surface.hpp"

#include <cmath>
#include <map>
#include <unordered_map>
#include <utility>

namespace trigrid {

namespace {

struct CellHash {
  std::size_t operator()(const std::array<long long, 3>& c) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

TriangleSurface TriangleSurface::from_soup(const std::vector<std::array<Vec3, 3>>& soup,
                                           double weld_tolerance) {
  TriangleSurface s;
  if (soup.empty()) return s;
  Box3 b{soup[0][0], soup[0][0]};
  for (const auto& t : soup) {
    for (const Vec3& v : t) {
      b.lo = b.lo.cwiseMin(v);
      b.hi = b.hi.cwiseMax(v);
    }
  }
  const double tol = std::max(weld_tolerance * b.diagonal(), 1e-300);
  std::unordered_map<std::array<long long, 3>, std::vector<int>, CellHash> cells;
  auto cell_of = [&](const Vec3& v) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(v.x() / tol)),
                                    static_cast<long long>(std::floor(v.y() / tol)),
                                    static_cast<long long>(std::floor(v.z() / tol))};
  };
  auto weld = [&](const Vec3& v) {
    const auto c = cell_of(v);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = cells.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == cells.end()) continue;
          for (int idx : it->second) {
            if ((s.vertices[idx] - v).norm() <= tol) return idx;
          }
        }
      }
    }
    const int idx = static_cast<int>(s.vertices.size());
    s.vertices.push_back(v);
    cells[c].push_back(idx);
    return idx;
  };
  s.triangles.reserve(soup.size());
  for (const auto& t : soup) {
    std::array<int, 3> tri{weld(t[0]), weld(t[1]), weld(t[2])};
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    s.triangles.push_back(tri);
  }
  s.recompute_normals();
  return s;
}

void TriangleSurface::recompute_normals() {
  normals.resize(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    const Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    const double len = n.norm();
    normals[t] = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
  }
}

Box3 TriangleSurface::bounds() const {
  if (vertices.empty()) return {};
  Box3 b{vertices[0], vertices[0]};
  for (const Vec3& v : vertices) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

double TriangleSurface::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    a += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
  }
  return a;
}

double TriangleSurface::enclosed_volume() const {
  double v = 0.0;
  for (const auto& t : triangles) {
    v += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
  }
  return v;
}

void TriangleSurface::validate() const {
  const int nv = static_cast<int>(vertices.size());
  const double diag = bounds().diagonal();
  const double min_area = 1e-12 * diag * diag;
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) {
        throw GeometryError("triangle " + std::to_string(t) + " has invalid vertex index");
      }
    }
    const double a =
        0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]).norm();
    if (!(a > min_area)) {
      throw GeometryError("triangle " + std::to_string(t) + " is degenerate");
    }
    for (int k = 0; k < 3; ++k) {
      const std::pair<int, int> e{tri[k], tri[(k + 1) % 3]};
      if (++directed[e] > 1) {
        throw GeometryError("inconsistent orientation at edge (" + std::to_string(e.first) + ", " +
                            std::to_string(e.second) + ")");
      }
    }
  }
}

bool TriangleSurface::is_closed() const {
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [edge, n] : count) {
    if (n != 2) return false;
  }
  return true;
}

TriangleSurface make_icosphere(int subdivisions, double radius, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int ab = midpoint(tri[0], tri[1]);
      const int bc = midpoint(tri[1], tri[2]);
      const int ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  TriangleSurface s;
  s.vertices.reserve(v.size());
  for (const Vec3& p : v) s.vertices.push_back(center + radius * p);
  s.triangles = std::move(f);
  s.recompute_normals();
  return s;
}

TriangleSurface make_box_surface(const Vec3& lo, const Vec3& hi) {
  TriangleSurface s;
  for (int i = 0; i < 8; ++i) {
    s.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                            (i & 4) ? hi.z() : lo.z());
  }
  // Outward-wound quads, corner bits (x, y, z) -> 1, 2, 4.
  const std::array<std::array<int, 4>, 6> quads = {{{0, 4, 6, 2},
                                                    {1, 3, 7, 5},
                                                    {0, 1, 5, 4},
                                                    {2, 6, 7, 3},
                                                    {0, 2, 3, 1},
                                                    {4, 5, 7, 6}}};
  for (const auto& q : quads) {
    s.triangles.push_back({q[0], q[1], q[2]});
    s.triangles.push_back({q[0], q[2], q[3]});
  }
  s.recompute_normals();
  return s;
}

}  // namespace trigrid
