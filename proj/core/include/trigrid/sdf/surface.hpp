#pragma once

#include "trigrid/common.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace trigrid {

// Indexed triangle mesh. Triangle winding defines the outward normal
// (counter-clockwise seen from outside).
struct TriangleSurface {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;  // unit, one per triangle

  // Welds coincident corners of a triangle soup (tolerance relative to the
  // bounding-box diagonal) and computes per-triangle normals.
  static TriangleSurface from_soup(const std::vector<std::array<Vec3, 3>>& soup,
                                   double weld_tolerance = 1e-6);

  // Checks index validity, non-degeneracy and consistent orientation of
  // interior edges. Throws GeometryError.
  void validate() const;

  // True when every edge has exactly two incident triangles.
  bool is_closed() const;

  Box3 bounds() const;
  double area() const;
  // Enclosed volume by the divergence theorem (positive for outward normals).
  double enclosed_volume() const;

  void recompute_normals();
};

// Loop-subdivided icosahedron projected onto a sphere.
TriangleSurface make_icosphere(int subdivisions, double radius = 1.0,
                               const Vec3& center = Vec3::Zero());
// Axis-aligned box, two triangles per face.
TriangleSurface make_box_surface(const Vec3& lo, const Vec3& hi);

// Binary or ASCII STL; the format is detected from the content.
TriangleSurface read_stl(const std::filesystem::path& path, double weld_tolerance = 1e-6);
void write_stl_binary(const std::filesystem::path& path, const TriangleSurface& surface);
void write_stl_ascii(const std::filesystem::path& path, const TriangleSurface& surface);

}  // namespace trigrid
