#include "support.hpp"

#include "trigrid/sdf/distance_grid.hpp"
#include "trigrid/sdf/mesh_distance.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace trigrid {
namespace {

using test::uniform;
using test::uniform_point;

// Largest gap between the unit sphere and the planes of an inscribed mesh.
double chordal_error(const TriangleSurface& s) {
  double worst = 0.0;
  for (std::size_t t = 0; t < s.triangles.size(); ++t) {
    const double plane = std::abs(s.normals[t].dot(s.vertices[s.triangles[t][0]]));
    worst = std::max(worst, 1.0 - plane);
  }
  return worst;
}

TEST(SurfaceGrid, OriginOfSphereReadsPositiveClamp) {
  const TriangleSurface sphere = make_icosphere(4);
  const double h = 1.0 / 32;
  const SparseDistanceGrid g = build_from_surface(sphere, h, 3);
  EXPECT_DOUBLE_EQ(g.value(Vec3::Zero()), 3 * h);
  EXPECT_DOUBLE_EQ(g.band(), 3 * h);
}

TEST(SurfaceGrid, BandNodesMatchRadialDistance) {
  const TriangleSurface sphere = make_icosphere(4);
  const double h = 1.0 / 32;
  const Box3 domain{Vec3::Constant(-1.5), Vec3::Constant(1.5)};
  const SparseDistanceGrid g = build_from_surface(sphere, h, 3, &domain);
  const double tol = chordal_error(sphere) + 1e-12;

  // Node at (1 + h, 0, 0).
  const SparseDistanceGrid::Index3 n{81, 48, 48};
  ASSERT_NEAR((g.node_position(n) - Vec3(1 + h, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(g.node_value(n), -h, tol);

  int checked = 0;
  while (checked < 100) {
    const SparseDistanceGrid::Index3 m{static_cast<int>(uniform(0, 96)), static_cast<int>(uniform(0, 96)),
                                       static_cast<int>(uniform(0, 96))};
    const double exact = 1.0 - g.node_position(m).norm();
    if (std::abs(exact) > g.band() - tol) continue;
    EXPECT_NEAR(g.node_value(m), exact, tol);
    ++checked;
  }
}

TEST(SurfaceGrid, CubeNodeAboveTopFace) {
  const TriangleSurface cube = make_box_surface(Vec3::Zero(), Vec3::Ones());
  const double h = 1.0 / 8;
  const SparseDistanceGrid g = build_from_surface(cube, h, 3);
  const SparseDistanceGrid::Index3 n{9, 9, 14};
  ASSERT_NEAR((g.node_position(n) - Vec3(0.5, 0.5, 1.125)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(g.node_value(n), -0.125, 1e-14);
}

TEST(SurfaceGrid, OpenSurfaceIsRejected) {
  TriangleSurface s;
  s.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  s.triangles = {{0, 1, 2}};
  s.recompute_normals();
  EXPECT_THROW(build_from_surface(s, 0.1, 3), GeometryError);
}

TEST(SurfaceGrid, SignAgreesWithRayParity) {
  const TriangleSurface sphere = make_icosphere(3);
  const double h = 1.0 / 32;
  const SparseDistanceGrid g = build_from_surface(sphere, h, 3);
  const double margin = g.band() - h * std::sqrt(3.0);
  const TriangleMeshDistance exact(sphere);
  int checked = 0;
  while (checked < 1000) {
    const Vec3 x = uniform_point(Box3{Vec3::Constant(-1.2), Vec3::Constant(1.2)});
    const double d = exact.signed_distance(x);
    if (std::abs(d) >= margin || std::abs(d) < 1e-3) continue;
    EXPECT_EQ(g.value(x) > 0.0, test::inside_by_parity(sphere, x)) << format_point(x);
    ++checked;
  }
}

TEST(SurfaceGrid, StoredValuesStayWithinClampedBand) {
  const SparseDistanceGrid g = build_from_surface(make_icosphere(3), 1.0 / 16, 3);
  const double bound = g.band() + g.spacing() * std::sqrt(3.0);
  const int b = SparseDistanceGrid::kBlock;
  const auto counts = g.node_counts();
  g.for_each_block([&](const SparseDistanceGrid::Index3& blk, const double* v) {
    for (int k = 0; k < b; ++k)
      for (int j = 0; j < b; ++j)
        for (int i = 0; i < b; ++i) {
          if (blk[0] * b + i >= counts[0] || blk[1] * b + j >= counts[1] || blk[2] * b + k >= counts[2]) continue;
          ASSERT_LE(std::abs(v[(k * b + j) * b + i]), bound);
        }
  });
}

TEST(AnalyticGrid, NodeOnCoarseSphereGrid) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  const SparseDistanceGrid g = build_from_analytic(sphere, Box3{Vec3::Constant(-2), Vec3::Constant(2)}, 0.5, 3);
  const SparseDistanceGrid::Index3 n{5, 4, 4};
  ASSERT_NEAR((g.node_position(n) - Vec3(0.5, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.node_value(n), 0.5);
}

TEST(AnalyticGrid, BandNodesEqualFieldExactly) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  const SparseDistanceGrid g =
      build_from_analytic(sphere, Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, 1.0 / 128, 3);
  const int b = SparseDistanceGrid::kBlock;
  const auto counts = g.node_counts();
  std::size_t checked = 0;
  g.for_each_block([&](const SparseDistanceGrid::Index3& blk, const double* v) {
    for (int k = 0; k < b; ++k)
      for (int j = 0; j < b; ++j)
        for (int i = 0; i < b; ++i) {
          const SparseDistanceGrid::Index3 n{blk[0] * b + i, blk[1] * b + j, blk[2] * b + k};
          if (n[0] >= counts[0] || n[1] >= counts[1] || n[2] >= counts[2]) continue;
          const double exact = sphere.value(g.node_position(n));
          if (std::abs(exact) > g.band()) continue;
          ASSERT_NEAR(v[(k * b + j) * b + i], exact, 1e-14);
          ++checked;
        }
  });
  EXPECT_GT(checked, 100000u);
}

TEST(AnalyticGrid, DifferenceIsNegativeInsideRemovedPart) {
  const AnalyticSdf shape = AnalyticSdf::parse("difference(box(-1,-1,-1,1,1,1), cylinder(0,0,0, 0,0,1, 0.3, 2))");
  const SparseDistanceGrid g = build_from_analytic(shape, Box3{Vec3::Constant(-1.5), Vec3::Constant(1.5)}, 1.0 / 16, 3);
  EXPECT_LT(g.value(Vec3(0.1, 0.0, 0.2)), 0.0);
  EXPECT_LT(shape.value(Vec3(0.1, 0.0, 0.2)), 0.0);
  EXPECT_GT(g.value(Vec3(0.7, 0.0, 0.2)), 0.0);
}

class SphereGridEval : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = new SparseDistanceGrid(build_from_analytic(AnalyticSdf::named("sphere"),
                                                       Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, 1.0 / 128, 3));
  }
  static void TearDownTestSuite() {
    delete grid_;
    grid_ = nullptr;
  }
  static SparseDistanceGrid* grid_;
};
SparseDistanceGrid* SphereGridEval::grid_ = nullptr;

TEST_F(SphereGridEval, NodeValuesAreReproduced) {
  const SparseDistanceGrid& g = *grid_;
  for (int t = 0; t < 200; ++t) {
    const SparseDistanceGrid::Index3 n{static_cast<int>(uniform(0, 320)), static_cast<int>(uniform(0, 320)),
                                       static_cast<int>(uniform(0, 320))};
    EXPECT_EQ(g.value(g.node_position(n)), g.node_value(n));
  }
}

TEST_F(SphereGridEval, CellCenterIsMeanOfCorners) {
  const SparseDistanceGrid& g = *grid_;
  for (int t = 0; t < 100; ++t) {
    const SparseDistanceGrid::Index3 n{static_cast<int>(uniform(100, 250)), static_cast<int>(uniform(0, 319)),
                                       static_cast<int>(uniform(0, 319))};
    double mean = 0.0;
    for (int c = 0; c < 8; ++c) mean += g.node_value({n[0] + (c & 1), n[1] + (c >> 1 & 1), n[2] + (c >> 2 & 1)});
    mean /= 8;
    const Vec3 center = g.node_position(n) + Vec3::Constant(0.5 * g.spacing());
    EXPECT_NEAR(g.value(center), mean, 1e-15);
  }
}

TEST_F(SphereGridEval, RadialZeroCrossingNearUnitRadius) {
  const SparseDistanceGrid& g = *grid_;
  const double h = g.spacing();
  for (int t = 0; t < 50; ++t) {
    const Vec3 dir = Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)).normalized();
    double a = 1.0 - 2 * h, b = 1.0 + 2 * h;
    ASSERT_GT(g.value(a * dir), 0.0);
    ASSERT_LT(g.value(b * dir), 0.0);
    for (int i = 0; i < 80; ++i) {
      const double m = 0.5 * (a + b);
      (g.value(m * dir) >= 0.0 ? a : b) = m;
    }
    EXPECT_LE(std::abs(a - 1.0), h * h);
  }
}

TEST_F(SphereGridEval, OutsideLatticeThrows) {
  EXPECT_THROW(grid_->value(Vec3(2.0, 0.0, 0.0)), GeometryError);
}

TEST_F(SphereGridEval, NormalPointsInwardAndMatchesDifferences) {
  const SparseDistanceGrid& g = *grid_;
  const double h = g.spacing();
  const Vec3 x(1.0 - 0.7 * h, 0.2 * h, 0.4 * h);
  const Vec3 n = unit_normal(g, x);
  EXPECT_NEAR(n.norm(), 1.0, 1e-14);
  EXPECT_LT((n - Vec3(-1, 0, 0)).norm(), 2 * h);
  const double s = h / 10;
  Vec3 fd;
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = Vec3::Unit(a) * s;
    fd[a] = (g.value(x + e) - g.value(x - e)) / (2 * s);
  }
  EXPECT_LT((n - fd.normalized()).norm(), 1e-9);
}

TEST_F(SphereGridEval, NormalThrowsInClampedRegion) {
  EXPECT_THROW(unit_normal(*grid_, Vec3(0.01, 0.02, 0.03)), GeometryError);
}

TEST(Normal, HalfSpaceIsExact) {
  const AnalyticSdf half = AnalyticSdf::half_space(Vec3(0, 0, 1), 0.3);
  EXPECT_EQ(unit_normal(half, Vec3(0.1, 0.2, 0.25)), Vec3(0, 0, -1));
  const SparseDistanceGrid g = build_from_analytic(half, Box3{Vec3::Zero(), Vec3::Ones()}, 1.0 / 16, 3);
  EXPECT_LT((unit_normal(g, Vec3(0.41, 0.37, 0.29)) - Vec3(0, 0, -1)).norm(), 1e-12);
}

TEST(Normal, BoxEdgeProbesDiverge) {
  const AnalyticSdf box = AnalyticSdf::box(Vec3::Zero(), Vec3::Ones());
  const double h = 1.0 / 32;
  const SparseDistanceGrid g = build_from_analytic(box, Box3{Vec3::Constant(-0.5), Vec3::Constant(1.5)}, h, 3);
  const Vec3 top = unit_normal(g, Vec3(0.5, 1.0 - 2.3 * h, 1.0 + 0.6 * h));
  const Vec3 side = unit_normal(g, Vec3(0.5, 1.0 + 0.6 * h, 1.0 - 2.3 * h));
  EXPECT_LE(top.dot(side), std::cos(M_PI / 4) + 1e-9);
}

TEST(AnalyticGrid, InterpolationErrorIsSecondOrder) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  const Box3 domain{Vec3::Constant(-1.25), Vec3::Constant(1.25)};
  auto max_error = [&](double h) {
    const SparseDistanceGrid g = build_from_analytic(sphere, domain, h, 3);
    double worst = 0.0;
    auto& gen = test::rng();
    gen.seed(7);
    for (int t = 0; t < 2000; ++t) {
      const Vec3 dir = Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)).normalized();
      const Vec3 x = uniform(0.94, 1.06) * dir;
      worst = std::max(worst, std::abs(g.value(x) - sphere.value(x)));
    }
    return worst;
  };
  EXPECT_GE(max_error(1.0 / 16) / max_error(1.0 / 32), 3.5);
}

TEST(Surface, StlRoundTrip) {
  const TriangleSurface s = make_icosphere(2);
  const auto dir = std::filesystem::temp_directory_path() / "trigrid_stl_test";
  std::filesystem::create_directories(dir);
  write_stl_binary(dir / "b.stl", s);
  write_stl_ascii(dir / "a.stl", s);
  for (const char* name : {"b.stl", "a.stl"}) {
    const TriangleSurface r = read_stl(dir / name);
    EXPECT_EQ(r.triangles.size(), s.triangles.size());
    EXPECT_EQ(r.vertices.size(), s.vertices.size());
    EXPECT_TRUE(r.is_closed());
    EXPECT_NEAR(r.area(), s.area(), 1e-5);
    EXPECT_NEAR(r.enclosed_volume(), s.enclosed_volume(), 1e-5);
  }
  std::filesystem::remove_all(dir);
}

TEST(Surface, ClosestPointFeatures) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  ClosestPoint f = closest_point_on_triangle(Vec3(0.2, 0.2, 1), a, b, c);
  EXPECT_EQ(f.feature, TriangleFeature::Face);
  EXPECT_NEAR(f.distance, 1.0, 1e-15);
  ClosestPoint e = closest_point_on_triangle(Vec3(0.5, -1, 0), a, b, c);
  EXPECT_EQ(e.feature, TriangleFeature::Edge);
  EXPECT_EQ(e.feature_index, 0);
  EXPECT_NEAR(e.distance, 1.0, 1e-15);
  ClosestPoint v = closest_point_on_triangle(Vec3(-1, -1, 0), a, b, c);
  EXPECT_EQ(v.feature, TriangleFeature::Vertex);
  EXPECT_EQ(v.feature_index, 0);
  EXPECT_NEAR(v.distance, std::sqrt(2.0), 1e-15);
}

TEST(Surface, IcosphereMeasuresApproachSphere) {
  const TriangleSurface s = make_icosphere(5);
  EXPECT_NEAR(s.area(), 4 * M_PI, 4 * M_PI * 2e-3);
  EXPECT_NEAR(s.enclosed_volume(), 4 * M_PI / 3, 4 * M_PI / 3 * 3e-3);
}

}  // namespace
}  // namespace trigrid
