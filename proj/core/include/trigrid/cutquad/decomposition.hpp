#pragma once

#include "trigrid/cutquad/rules.hpp"
#include "trigrid/sdf/field.hpp"

#include <array>
#include <functional>
#include <vector>

namespace trigrid {

enum class QuadClass : std::uint8_t { Active, Inactive, Cut };

struct QuadCell {
  Box3 box;
  int level = 0;  // sub-level within the FE cell, 0 = the FE cell itself
  QuadClass cls = QuadClass::Active;
};

struct Tet {
  std::array<Vec3, 4> v;
  double volume() const;  // signed; positive for positive orientation
};

struct BoundaryTriangle {
  std::array<Vec3, 3> v;
  Vec3 normal = Vec3::Zero();  // unit, pointing out of the domain
  double area = 0.0;
};

// How each cut quadrature leaf is split into six tetrahedra.
//  Consistent: always pattern 0 in lattice-mirrored frames, so face diagonals
//  of neighbouring leaves of equal size agree and the boundary surface is
//  watertight.
//  MinMixed: the pattern with the fewest sign-mixed tets (ties: lowest index).
//  Neighbours may disagree on shared diagonals.
enum class SplitPolicy { Consistent, MinMixed };

struct CutQuadOptions {
  int r_q = 2;
  SplitPolicy policy = SplitPolicy::Consistent;
  // Bisection stops once the bracket is shorter than this length; 0 picks
  // resolution/100 for sampled fields and 1e-10 * edge length otherwise.
  double root_tol = 0.0;
  int max_bisection = 60;
  // Origin of the global lattice that fixes the mirrored split frames.
  Vec3 lattice_origin = Vec3::Zero();
};

// Bottom-up quadrature octree: the 8^r_q sub-cells are classified by their
// corner signs and uniform siblings merged in Z-order. Returns the leaves in
// Z-order. `corner_values`, when given, receives phi on the
// (2^r_q + 1)^3 corner lattice, x fastest.
std::vector<QuadCell> build_quadrature_grid(const Box3& cell, const ImplicitField& phi, int r_q,
                                            std::vector<double>* corner_values = nullptr);

// Local corner k of a hex is (k & 1, k >> 1 & 1, k >> 2 & 1).
// Six positively oriented tets around the main diagonal of `pattern` in the
// frame mirrored by `mirror` (bit a flips axis a).
std::array<Tet, 6> split_hex_six_tets(const Box3& box, int pattern, int mirror = 0);
// Corner index quadruples of the same split.
std::array<std::array<int, 4>, 6> six_tet_corners(int pattern, int mirror = 0);
// Number of tets with both signs among their corners (phi >= 0 is inside).
int count_mixed_tets(const std::array<double, 8>& corner_phi, int pattern, int mirror = 0);
int choose_split_pattern(const std::array<double, 8>& corner_phi, int mirror = 0);

// Point on [a, b] where phi changes sign; phi(a) >= 0 > phi(b) or the
// reverse. Bisection to bracket length tol, then a secant step inside the
// final bracket. Throws GeometryError on same-sign endpoints or when
// max_iter is exhausted.
Vec3 edge_root_bisection(const Vec3& a, const Vec3& b, const ImplicitField& phi, double tol,
                         int max_iter = 60);

// Tessellates {x in tet : phi >= 0} (or phi < 0 when `outside` is set).
// `root(i, j)` returns the surface point on tet edge (i, j). Boundary
// triangles are oriented out of the tessellated region.
void marching_tetrahedra(const Tet& tet, const std::array<double, 4>& phi,
                         const std::function<Vec3(int, int)>& root, std::vector<Tet>& inside,
                         std::vector<BoundaryTriangle>* triangles, bool outside = false,
                         double min_volume = 0.0);

struct CellDecomposition {
  std::vector<QuadCell> cells;  // merged active cells only
  std::vector<Tet> tets;
  std::vector<BoundaryTriangle> triangles;
  double cut_leaf_volume = 0.0;  // total volume of cut quadrature leaves

  double inside_volume() const;
  double surface_area() const;
};

// Full decomposition of one FE cell: merged active boxes plus marching
// tetrahedra of the cut leaves. With `outside`, tessellates phi < 0 instead
// (and collects inactive boxes).
CellDecomposition decompose_cell(const Box3& cell, const ImplicitField& phi,
                                 const CutQuadOptions& options, bool outside = false);

struct VolumePoint {
  Vec3 x;
  double w;
};
struct SurfacePoint {
  Vec3 x;
  double w;
  Vec3 n;
};

struct QuadratureDegrees {
  int volume = 2;   // exactness on tets; boxes use ceil((volume + 1) / 2)^3 Gauss points
  int surface = 2;  // exactness on boundary triangles
  static QuadratureDegrees for_order(int p) { return {2 * p, 2 * p}; }
};

void emit_quadrature(const CellDecomposition& dec, const QuadratureDegrees& degrees,
                     std::vector<VolumePoint>& volume, std::vector<SurfacePoint>* surface);

}  // namespace trigrid
