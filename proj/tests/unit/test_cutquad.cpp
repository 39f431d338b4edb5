#include "support.hpp"

#include "trigrid/cutquad/decomposition.hpp"
#include "trigrid/sdf/distance_grid.hpp"

#include <gtest/gtest.h>

#include <map>

namespace trigrid {
namespace {

const Box3 kCell{Vec3::Zero(), Vec3::Ones()};

double factorial(int n) { return std::tgamma(n + 1.0); }

// Exact integral of a barycentric monomial over a simplex of measure 1:
// d! prod(a_i!) / (d + sum a_i)!.
double simplex_monomial(const std::vector<int>& a) {
  const int d = static_cast<int>(a.size()) - 1;
  double num = factorial(d);
  int sum = 0;
  for (int k : a) {
    num *= factorial(k);
    sum += k;
  }
  return num / factorial(d + sum);
}

TEST(Rules, GaussLegendreExactness) {
  for (int n = 1; n <= 8; ++n) {
    const Rule1D r = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.x.size(); ++q) s += r.w[q] * std::pow(r.x[q], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << n << " " << k;
    }
  }
}

TEST(Rules, TetRulesIntegrateMonomialsExactly) {
  for (int degree = 1; degree <= 8; ++degree) {
    const TetRule r = tet_rule(degree);
    EXPECT_GE(r.degree, degree);
    for (double w : r.w) EXPECT_GT(w, 0.0) << "degree " << degree;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c)
          for (int d = 0; a + b + c + d <= degree; ++d) {
            double s = 0.0;
            for (std::size_t q = 0; q < r.w.size(); ++q)
              s += r.w[q] * std::pow(r.bary[q][0], a) * std::pow(r.bary[q][1], b) * std::pow(r.bary[q][2], c) *
                   std::pow(r.bary[q][3], d);
            const double exact = simplex_monomial({a, b, c, d});
            EXPECT_NEAR(s, exact, 1e-12 * exact) << degree << ": " << a << b << c << d;
          }
  }
}

TEST(Rules, TriangleRulesIntegrateMonomialsExactly) {
  for (int degree = 1; degree <= 8; ++degree) {
    const TriangleRule r = triangle_rule(degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          double s = 0.0;
          for (std::size_t q = 0; q < r.w.size(); ++q)
            s += r.w[q] * std::pow(r.bary[q][0], a) * std::pow(r.bary[q][1], b) * std::pow(r.bary[q][2], c);
          const double exact = simplex_monomial({a, b, c});
          EXPECT_NEAR(s, exact, 1e-12 * exact) << degree << ": " << a << b << c;
        }
  }
}

TEST(QuadratureGrid, FullyActiveCellMergesToOne) {
  const AnalyticSdf big = AnalyticSdf::sphere(Vec3::Zero(), 10);
  const auto cells = build_quadrature_grid(kCell, big, 3);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].cls, QuadClass::Active);
  EXPECT_EQ(cells[0].level, 0);
  EXPECT_EQ(cells[0].box.lo, kCell.lo);
  EXPECT_EQ(cells[0].box.hi, kCell.hi);
}

TEST(QuadratureGrid, ZeroLevelsKeepsTheCutCell) {
  const AnalyticSdf half = AnalyticSdf::half_space(Vec3(1, 0, 0), 0.3);
  const auto cells = build_quadrature_grid(kCell, half, 0);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].cls, QuadClass::Cut);
}

// Classifies the 4^3 leaves by corner signs and merges uniform sibling
// octets bottom-up.
std::map<QuadClass, int> brute_force_merge(const ImplicitField& phi) {
  const int n = 4;
  auto corner = [&](int i, int j, int k) { return phi.value(Vec3(i, j, k) / n) >= 0.0; };
  std::vector<int> cls(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int pos = 0;
        for (int c = 0; c < 8; ++c) pos += corner(i + (c & 1), j + (c >> 1 & 1), k + (c >> 2 & 1));
        cls[(k * n + j) * n + i] = pos == 8 ? 0 : pos == 0 ? 1 : 2;
      }
  std::map<QuadClass, int> count;
  const QuadClass names[3] = {QuadClass::Active, QuadClass::Inactive, QuadClass::Cut};
  // Level-1 octets.
  std::vector<int> parent(8, -1);
  for (int K = 0; K < 2; ++K)
    for (int J = 0; J < 2; ++J)
      for (int I = 0; I < 2; ++I) {
        int first = cls[(2 * K * n + 2 * J) * n + 2 * I];
        bool uniform = first != 2;
        for (int c = 0; c < 8; ++c)
          uniform = uniform && cls[((2 * K + (c >> 2 & 1)) * n + 2 * J + (c >> 1 & 1)) * n + 2 * I + (c & 1)] == first;
        if (uniform) {
          parent[(K * 2 + J) * 2 + I] = first;
        } else {
          for (int c = 0; c < 8; ++c)
            ++count[names[cls[((2 * K + (c >> 2 & 1)) * n + 2 * J + (c >> 1 & 1)) * n + 2 * I + (c & 1)]]];
        }
      }
  const bool all_same = std::all_of(parent.begin(), parent.end(), [&](int c) { return c >= 0 && c == parent[0]; });
  if (all_same) {
    ++count[names[parent[0]]];
  } else {
    for (int c : parent)
      if (c >= 0) ++count[names[c]];
  }
  return count;
}

TEST(QuadratureGrid, MergeMatchesBruteForce) {
  for (const double offset : {0.3, 0.55, 0.8}) {
    const AnalyticSdf half = AnalyticSdf::half_space(Vec3(1, 0, 0), offset);
    const auto cells = build_quadrature_grid(kCell, half, 2);
    std::map<QuadClass, int> count;
    double volume = 0.0;
    for (const auto& c : cells) {
      ++count[c.cls];
      volume += c.box.extent().prod();
    }
    EXPECT_EQ(count, brute_force_merge(half)) << offset;
    EXPECT_NEAR(volume, 1.0, 1e-15);
  }
  const AnalyticSdf ball = AnalyticSdf::sphere(Vec3(0.1, 0.2, 0.3), 0.45);
  std::map<QuadClass, int> count;
  for (const auto& c : build_quadrature_grid(kCell, ball, 2)) ++count[c.cls];
  EXPECT_EQ(count, brute_force_merge(ball));
}

TEST(SixTets, TileTheHexWithPositiveVolumes) {
  const Box3 box{Vec3(0.1, -0.2, 0.3), Vec3(0.6, 0.3, 0.8)};
  for (int pattern = 0; pattern < 3; ++pattern)
    for (int mirror = 0; mirror < 8; ++mirror) {
      double sum = 0.0;
      for (const Tet& t : split_hex_six_tets(box, pattern, mirror)) {
        EXPECT_GT(t.volume(), 0.0);
        sum += t.volume();
      }
      EXPECT_NEAR(sum, 0.125, 1e-16);
    }
}

TEST(SixTets, PatternMinimizesMixedTets) {
  std::array<double, 8> all_pos;
  all_pos.fill(1.0);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(count_mixed_tets(all_pos, p), 0);

  auto oracle_mixed = [](const std::array<double, 8>& phi, int pattern) {
    int mixed = 0;
    for (const auto& t : six_tet_corners(pattern)) {
      int pos = 0;
      for (int c : t) pos += phi[c] >= 0;
      mixed += pos != 0 && pos != 4;
    }
    return mixed;
  };
  std::vector<std::array<double, 8>> cases = {{1, 1, 1, 1, -1, -1, -1, -1}, {1, -1, -1, -1, -1, -1, -1, -1}};
  for (int t = 0; t < 50; ++t) {
    std::array<double, 8> phi;
    for (double& v : phi) v = test::uniform(-1, 1);
    cases.push_back(phi);
  }
  for (const auto& phi : cases) {
    const int chosen = choose_split_pattern(phi);
    int best = 7;
    for (int p = 0; p < 3; ++p) best = std::min(best, oracle_mixed(phi, p));
    EXPECT_EQ(oracle_mixed(phi, chosen), best);
    EXPECT_LE(best, 6);
    for (int p = 0; p < chosen; ++p) EXPECT_GT(oracle_mixed(phi, p), best);
  }
}

Tet unit_tet() { return Tet{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}}; }

std::function<Vec3(int, int)> linear_root(const Tet& tet, const std::array<double, 4>& phi) {
  return [tet, phi](int i, int j) {
    const double t = phi[i] / (phi[i] - phi[j]);
    return Vec3(tet.v[i] + t * (tet.v[j] - tet.v[i]));
  };
}

double total_volume(const std::vector<Tet>& tets) {
  double v = 0.0;
  for (const Tet& t : tets) v += t.volume();
  return v;
}

TEST(MarchingTets, FullyInsideAndOutside) {
  const Tet tet = unit_tet();
  std::vector<Tet> inside;
  std::vector<BoundaryTriangle> tris;
  marching_tetrahedra(tet, {1, 1, 1, 1}, linear_root(tet, {1, 1, 1, 1}), inside, &tris);
  ASSERT_EQ(inside.size(), 1u);
  EXPECT_TRUE(tris.empty());
  EXPECT_DOUBLE_EQ(inside[0].volume(), tet.volume());
  inside.clear();
  marching_tetrahedra(tet, {-1, -1, -1, -1}, linear_root(tet, {-1, -1, -1, -1}), inside, &tris);
  EXPECT_TRUE(inside.empty());
  EXPECT_TRUE(tris.empty());
}

TEST(MarchingTets, OnePositiveCornerGivesSimilarTet) {
  const Tet tet = unit_tet();
  const std::array<double, 4> phi{1, -1, -1, -1};
  std::vector<Tet> inside;
  std::vector<BoundaryTriangle> tris;
  marching_tetrahedra(tet, phi, linear_root(tet, phi), inside, &tris);
  ASSERT_EQ(inside.size(), 1u);
  ASSERT_EQ(tris.size(), 1u);
  EXPECT_NEAR(inside[0].volume(), tet.volume() / 8, 1e-16);
  // Outward from {phi >= 0}, i.e. away from the origin.
  EXPECT_GT(tris[0].normal.dot(Vec3(1, 1, 1)), 0.0);
  EXPECT_NEAR(tris[0].area, std::sqrt(3.0) / 8, 1e-15);
}

TEST(MarchingTets, CaseCountsAndComplementaryVolumes) {
  const Tet tet{{Vec3(0.1, 0, 0), Vec3(1.2, 0.1, 0), Vec3(0.2, 0.9, 0.1), Vec3(0.3, 0.2, 1.1)}};
  for (int positives = 1; positives <= 3; ++positives) {
    std::array<double, 4> phi;
    for (int i = 0; i < 4; ++i) phi[i] = i < positives ? test::uniform(0.1, 1) : -test::uniform(0.1, 1);
    std::vector<Tet> in, out;
    std::vector<BoundaryTriangle> tin, tout;
    marching_tetrahedra(tet, phi, linear_root(tet, phi), in, &tin);
    marching_tetrahedra(tet, phi, linear_root(tet, phi), out, &tout, true);
    const std::size_t expected_tets[4] = {0, 1, 3, 3};
    const std::size_t expected_tris[4] = {0, 1, 2, 1};
    EXPECT_EQ(in.size(), expected_tets[positives]);
    EXPECT_EQ(tin.size(), expected_tris[positives]);
    EXPECT_NEAR(total_volume(in) + total_volume(out), tet.volume(), 1e-15);
    for (const Tet& t : in) EXPECT_GT(t.volume(), 0.0);
    // Linear field: the boundary normal is -grad(phi) / |grad(phi)|.
    Eigen::Matrix3d J;
    for (int a = 0; a < 3; ++a) J.row(a) = (tet.v[a + 1] - tet.v[0]).transpose();
    const Vec3 grad = J.inverse() * Vec3(phi[1] - phi[0], phi[2] - phi[0], phi[3] - phi[0]);
    for (const auto& tr : tin) EXPECT_NEAR(tr.normal.dot(-grad.normalized()), 1.0, 1e-12);
    for (const auto& tr : tout) EXPECT_NEAR(tr.normal.dot(grad.normalized()), 1.0, 1e-12);
  }
}

TEST(EdgeRoot, LinearFields) {
  const AnalyticSdf plane = AnalyticSdf::half_space(Vec3(1, 0, 0), 0.5);
  const Vec3 mid = edge_root_bisection(Vec3(-0.5, 0, 0), Vec3(1.5, 0, 0), plane, 1e-10);
  EXPECT_NEAR(mid[0], 0.5, 1e-10);
  // phi = 3 at a, -1 at b: root at parameter 0.75.
  const AnalyticSdf steep = AnalyticSdf::half_space(Vec3(1, 0, 0), 0.75);
  const Vec3 r = edge_root_bisection(Vec3(-2.25, 0, 0), Vec3(1.75, 0, 0), steep, 1e-10);
  EXPECT_NEAR((r[0] + 2.25) / 4.0, 0.75, 1e-10);
  EXPECT_THROW(edge_root_bisection(Vec3(0, 0, 0), Vec3(0.1, 0, 0), plane, 1e-10), GeometryError);
}

TEST(EdgeRoot, SampledSphereRootNearUnitRadius) {
  const double h = 1.0 / 64;
  const SparseDistanceGrid g = build_from_analytic(AnalyticSdf::named("sphere"),
                                                   Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, h, 3);
  for (int t = 0; t < 50; ++t) {
    const Vec3 dir = Vec3(test::uniform(-1, 1), test::uniform(-1, 1), test::uniform(-1, 1)).normalized();
    const Vec3 x = edge_root_bisection(0.95 * dir, 1.05 * dir, g, h / 100);
    EXPECT_LE(std::abs(1.0 - x.norm()), h * h);
  }
}

TEST(Emit, ActiveCellGaussPoints) {
  const Box3 cell{Vec3::Zero(), Vec3::Constant(0.5)};
  const AnalyticSdf big = AnalyticSdf::sphere(Vec3::Zero(), 10);
  const CellDecomposition dec = decompose_cell(cell, big, CutQuadOptions{});
  std::vector<VolumePoint> vol;
  std::vector<SurfacePoint> surf;
  emit_quadrature(dec, QuadratureDegrees::for_order(1), vol, &surf);
  ASSERT_EQ(vol.size(), 8u);
  double w = 0.0;
  for (const auto& p : vol) w += p.w;
  EXPECT_NEAR(w, 0.125, 1e-16);
  EXPECT_TRUE(surf.empty());
}

// Integral of x^a y^b z^c over a tet by expanding in barycentrics on a
// high-order collapsed rule.
double reference_integral(const std::vector<Tet>& tets, const std::vector<QuadCell>& boxes, int a, int b, int c) {
  const TetRule r = tet_conical_rule(12);
  double s = 0.0;
  for (const Tet& t : tets)
    for (std::size_t q = 0; q < r.w.size(); ++q) {
      Vec3 x = Vec3::Zero();
      for (int k = 0; k < 4; ++k) x += r.bary[q][k] * t.v[k];
      s += r.w[q] * t.volume() * std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
    }
  auto moment = [](double lo, double hi, int k) { return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1); };
  for (const auto& q : boxes)
    s += moment(q.box.lo[0], q.box.hi[0], a) * moment(q.box.lo[1], q.box.hi[1], b) * moment(q.box.lo[2], q.box.hi[2], c);
  return s;
}

TEST(Emit, VolumePointsAreExactToTwiceTheOrder) {
  const Box3 cell{Vec3(0.2, 0.1, -0.3), Vec3(0.7, 0.6, 0.2)};
  const AnalyticSdf ball = AnalyticSdf::sphere(Vec3(0.3, 0.2, -0.1), 0.4);
  CutQuadOptions o;
  o.r_q = 2;
  const CellDecomposition dec = decompose_cell(cell, ball, o);
  for (int p = 1; p <= 2; ++p) {
    std::vector<VolumePoint> vol;
    emit_quadrature(dec, QuadratureDegrees::for_order(p), vol, nullptr);
    for (int a = 0; a <= 2 * p; ++a)
      for (int b = 0; a + b <= 2 * p; ++b)
        for (int c = 0; a + b + c <= 2 * p; ++c) {
          double s = 0.0;
          for (const auto& q : vol) s += q.w * std::pow(q.x[0], a) * std::pow(q.x[1], b) * std::pow(q.x[2], c);
          const double exact = reference_integral(dec.tets, dec.cells, a, b, c);
          EXPECT_NEAR(s, exact, 1e-12 * std::max(1e-3, std::abs(exact))) << p << ": " << a << b << c;
        }
  }
}

TEST(Emit, SurfacePointsCarryAreaAndNormals) {
  const Box3 cell{Vec3(0.5, 0.5, 0.5), Vec3(1.0, 1.0, 1.0)};
  const AnalyticSdf ball = AnalyticSdf::named("sphere");
  const CellDecomposition dec = decompose_cell(cell, ball, CutQuadOptions{});
  std::vector<VolumePoint> vol;
  std::vector<SurfacePoint> surf;
  emit_quadrature(dec, QuadratureDegrees::for_order(2), vol, &surf);
  double area = 0.0;
  for (const auto& s : surf) {
    area += s.w;
    EXPECT_NEAR(s.n.norm(), 1.0, 1e-14);
    EXPECT_GT(s.n.dot(s.x), 0.9);
  }
  EXPECT_NEAR(area, dec.surface_area(), 1e-14);
}

TEST(Decompose, InsideAndOutsideComplement) {
  const Box3 cell{Vec3(-0.1, 0.2, 0.0), Vec3(0.3, 0.6, 0.4)};
  for (int t = 0; t < 10; ++t) {
    const Vec3 c = test::uniform_point(cell);
    const AnalyticSdf ball = AnalyticSdf::sphere(c, test::uniform(0.05, 0.4));
    for (int r = 0; r <= 3; ++r) {
      CutQuadOptions o;
      o.r_q = r;
      const double in = decompose_cell(cell, ball, o).inside_volume();
      const double out = decompose_cell(cell, ball, o, true).inside_volume();
      EXPECT_NEAR(in + out, 0.064, 0.064 * 1e-10);
    }
  }
}

// Uniform grid of cut cells around the unit sphere, decomposed one by one.
struct SphereDecomposition {
  double volume = 0.0;
  double area = 0.0;
  std::vector<BoundaryTriangle> triangles;
};
SphereDecomposition decompose_sphere(const ImplicitField& phi, int level, SplitPolicy policy) {
  const FeGrid g = test::uniform_grid(Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, level, phi);
  SphereDecomposition out;
  CutQuadOptions o;
  o.r_q = 0;
  o.policy = policy;
  o.lattice_origin = g.box().lo;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CellClass c = g.leaf(static_cast<int>(i)).label;
    if (c == CellClass::Active) out.volume += std::pow(g.cell_edge(static_cast<int>(i)), 3);
    if (!is_cut(c)) continue;
    const CellDecomposition dec = decompose_cell(g.cell_box(static_cast<int>(i)), phi, o);
    out.volume += dec.inside_volume();
    out.area += dec.surface_area();
    out.triangles.insert(out.triangles.end(), dec.triangles.begin(), dec.triangles.end());
  }
  return out;
}

TEST(Decompose, SphereMeasures) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  // h_f = h_q = 2.5 / 32.
  const SphereDecomposition d = decompose_sphere(sphere, 5, SplitPolicy::MinMixed);
  EXPECT_NEAR(d.volume, 4 * M_PI / 3, 4 * M_PI / 3 * 5e-3);
  EXPECT_NEAR(d.area, 4 * M_PI, 4 * M_PI * 1e-2);
}

TEST(Decompose, ConsistentSplitIsWatertight) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  const SphereDecomposition d = decompose_sphere(sphere, 4, SplitPolicy::Consistent);
  auto key = [](const Vec3& a) {
    return std::array<long long, 3>{std::llround(a[0] * 1e8), std::llround(a[1] * 1e8), std::llround(a[2] * 1e8)};
  };
  std::map<std::array<std::array<long long, 3>, 2>, int> edges;
  for (const auto& t : d.triangles)
    for (int e = 0; e < 3; ++e) {
      auto a = key(t.v[e]), b = key(t.v[(e + 1) % 3]);
      if (b < a) std::swap(a, b);
      ++edges[{a, b}];
    }
  std::size_t bad = 0;
  for (const auto& [e, n] : edges) bad += n != 2;
  EXPECT_EQ(bad, 0u);
  EXPECT_GT(edges.size(), 1000u);
}

}  // namespace
}  // namespace trigrid
