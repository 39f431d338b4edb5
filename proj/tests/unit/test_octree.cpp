#include "support.hpp"

#include "trigrid/octree/morton.hpp"
#include "trigrid/octree/partition.hpp"

#include <gtest/gtest.h>

#include <queue>
#include <set>

namespace trigrid {
namespace {

const Box3 kUnitBox{Vec3::Zero(), Vec3::Ones()};

double total_volume(const FeGrid& g) {
  double v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) v += std::pow(g.cell_edge(static_cast<int>(i)), 3);
  return v;
}

TEST(Morton, RoundTrip) {
  for (int t = 0; t < 1000; ++t) {
    const auto x = static_cast<std::uint32_t>(test::uniform(0, 1 << 21));
    const auto y = static_cast<std::uint32_t>(test::uniform(0, 1 << 21));
    const auto z = static_cast<std::uint32_t>(test::uniform(0, 1 << 21));
    const auto d = morton::decode(morton::encode(x, y, z));
    EXPECT_EQ(d[0], x);
    EXPECT_EQ(d[1], y);
    EXPECT_EQ(d[2], z);
  }
  EXPECT_EQ(morton::encode(1, 0, 0), 1u);
  EXPECT_EQ(morton::encode(0, 1, 0), 2u);
  EXPECT_EQ(morton::encode(0, 0, 1), 4u);
}

TEST(BuildBase, ZeroRefinementsIsOneLeaf) {
  const FeGrid g = FeGrid::build_base(kUnitBox, 0);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.leaf(0).level, 0);
  EXPECT_EQ(g.leaf(0).label, CellClass::Unclassified);
}

TEST(BuildBase, TwoRefinementsGive64Leaves) {
  const FeGrid g = FeGrid::build_base(Box3{Vec3::Constant(-2), Vec3::Constant(2)}, 2);
  ASSERT_EQ(g.size(), 64u);
  for (const auto& c : g.leaves()) EXPECT_EQ(c.level, 2);
  EXPECT_EQ(total_volume(g), 64.0);
  EXPECT_DOUBLE_EQ(g.cell_edge(5), 1.0);
}

TEST(BuildBase, ZOrderAndKeysDecodeToAnchors) {
  const FeGrid g = FeGrid::build_base(kUnitBox, 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& c = g.leaf(static_cast<int>(i));
    const auto d = morton::decode(c.zkey);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(static_cast<std::int32_t>(d[a]), c.anchor[a]);
    if (i > 0) EXPECT_LT(g.leaf(static_cast<int>(i) - 1).zkey, c.zkey);
  }
}

TEST(BuildBase, RejectsNonCube) {
  EXPECT_THROW(FeGrid::build_base(Box3{Vec3::Zero(), Vec3(1, 2, 1)}, 1), Error);
}

TEST(Locate, PointsFallInTheirLeaf) {
  FeGrid g = FeGrid::build_base(kUnitBox, 2);
  std::vector<char> flags(g.size(), 0);
  flags[0] = 1;
  g.refine(flags);
  for (int t = 0; t < 500; ++t) {
    const Vec3 x = test::uniform_point(kUnitBox);
    EXPECT_TRUE(g.cell_box(g.locate(x)).contains(x));
  }
  EXPECT_THROW(g.locate(Vec3(1.5, 0, 0)), GeometryError);
}

class SphereRefinement : public ::testing::Test {
 protected:
  const AnalyticSdf sphere_ = AnalyticSdf::named("sphere");
  const Box3 box_{Vec3::Constant(-2), Vec3::Constant(2)};
};

TEST_F(SphereRefinement, OneSweepSplitsEveryCutLeaf) {
  FeGrid g = test::uniform_grid(box_, 3, sphere_);
  std::vector<Lattice3> cut;
  for (const auto& c : g.leaves())
    if (is_cut(c.label)) cut.push_back(c.anchor);
  ASSERT_FALSE(cut.empty());
  refine_toward_boundary(g, sphere_, 1, 0.0, ClassifyOptions{});
  for (const auto& a : cut) {
    EXPECT_EQ(g.find(3, a), -1);
    const std::int32_t s = FeGrid::lattice_size(4);
    for (int k = 0; k < 8; ++k) {
      const Lattice3 child{a[0] + (k & 1) * s, a[1] + (k >> 1 & 1) * s, a[2] + (k >> 2 & 1) * s};
      EXPECT_GE(g.find(4, child), 0);
    }
  }
  EXPECT_TRUE(g.is_balanced());
  EXPECT_DOUBLE_EQ(total_volume(g), 64.0);
}

TEST_F(SphereRefinement, CutCountGrowsWithSurfaceArea) {
  FeGrid g = test::uniform_grid(box_, 3, sphere_);
  auto cut_count = [&] {
    std::size_t n = 0;
    for (const auto& c : g.leaves()) n += is_cut(c.label);
    return n;
  };
  std::size_t previous = cut_count();
  for (int sweep = 0; sweep < 3; ++sweep) {
    refine_toward_boundary(g, sphere_, 1, 0.0, ClassifyOptions{});
    const std::size_t now = cut_count();
    if (sweep > 0) {
      const double ratio = static_cast<double>(now) / previous;
      EXPECT_GE(ratio, 3.0);
      EXPECT_LE(ratio, 5.0);
    }
    previous = now;
  }
}

TEST_F(SphereRefinement, BalanceIsIdempotentAndFaceBalanced) {
  FeGrid g = test::uniform_grid(box_, 2, sphere_);
  refine_toward_boundary(g, sphere_, 3, 0.0, ClassifyOptions{});
  EXPECT_TRUE(g.is_balanced());
  EXPECT_EQ(g.balance(), 0u);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int j : g.face_neighbors(static_cast<int>(i)))
      EXPECT_LE(std::abs(g.leaf(static_cast<int>(i)).level - g.leaf(j).level), 1);
  EXPECT_NEAR(total_volume(g), 64.0, 64.0 * 1e-12);
}

TEST_F(SphereRefinement, RespectsMinimumSize) {
  FeGrid g = test::uniform_grid(box_, 3, sphere_);
  refine_toward_boundary(g, sphere_, 4, 0.2, ClassifyOptions{});
  EXPECT_EQ(g.max_leaf_level(), 5);
}

TEST(Classify, LabelsFromCornerSigns) {
  FeGrid g = FeGrid::build_base(Box3{Vec3::Constant(-1), Vec3::Constant(1)}, 1);
  // Plane through the lower half: leaves with z < 0 straddle it.
  const AnalyticSdf half = AnalyticSdf::half_space(Vec3(0, 0, 1), -0.5);
  classify(g, half, ClassifyOptions{});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& c = g.leaf(static_cast<int>(i));
    const bool lower = g.cell_center(static_cast<int>(i))[2] < 0;
    EXPECT_EQ(c.label, lower ? CellClass::CutOrdinary : CellClass::Inactive);
  }
  const AnalyticSdf big = AnalyticSdf::sphere(Vec3::Zero(), 10);
  classify(g, big, ClassifyOptions{});
  for (const auto& c : g.leaves()) EXPECT_EQ(c.label, CellClass::Active);
}

TEST(Classify, SharpCornerIsExtraordinary) {
  FeGrid g = FeGrid::build_base(Box3{Vec3::Zero(), Vec3::Constant(2)}, 1);
  const AnalyticSdf box = AnalyticSdf::box(Vec3(0.45, 0.5, 0.55), Vec3::Constant(1.6));
  classify(g, box, ClassifyOptions{});
  // Every leaf holds one box corner.
  for (const auto& c : g.leaves()) EXPECT_EQ(c.label, CellClass::CutExtraordinary);
}

TEST(Classify, SupersamplingFindsThinHole) {
  const double h_g = 1.0 / 64;
  const AnalyticSdf slab = AnalyticSdf::half_space(Vec3(0, 0, 1), 0.9);
  const Vec3 axis_point(0.5625, 0.5625, 0.0);
  const AnalyticSdf hole = AnalyticSdf::cylinder(axis_point, Vec3(0, 0, 1), 1.5 * h_g, 4.0);
  const AnalyticSdf shape = AnalyticSdf::csg_difference(slab, hole);
  auto label_below_cut = [&](double h_sample) {
    FeGrid g = test::uniform_grid(kUnitBox, 3, shape, h_sample);
    return g.leaf(g.locate(Vec3(0.5625, 0.5625, 0.8))).label;
  };
  EXPECT_EQ(label_below_cut(0.0), CellClass::Active);
  EXPECT_EQ(label_below_cut(h_g), CellClass::CutExtraordinary);

  // A leaf with no cut face neighbour is not supersampled.
  FeGrid g = test::uniform_grid(kUnitBox, 3, shape, h_g);
  EXPECT_EQ(g.leaf(g.locate(Vec3(0.5625, 0.5625, 0.3))).label, CellClass::Active);
}

TEST(Classify, CornerLabelsAgreeWithDenseOracle) {
  const AnalyticSdf sphere = AnalyticSdf::named("sphere");
  const FeGrid g = test::uniform_grid(Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, 4, sphere);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Box3 b = g.cell_box(static_cast<int>(i));
    bool pos = false, neg = false;
    for (int k = 0; k <= 16; ++k)
      for (int j = 0; j <= 16; ++j)
        for (int l = 0; l <= 16; ++l) {
          const Vec3 x = b.lo + b.extent().cwiseProduct(Vec3(l, j, k) / 16.0);
          (sphere.value(x) >= 0 ? pos : neg) = true;
        }
    const CellClass c = g.leaf(static_cast<int>(i)).label;
    if (pos && !neg) EXPECT_EQ(c, CellClass::Active);
    if (neg && !pos) EXPECT_EQ(c, CellClass::Inactive);
  }
}

TEST(Classify, FinerSamplingOnlyAddsCutCells) {
  const AnalyticSdf shape = AnalyticSdf::parse("difference(box(-1,-1,-1,1,1,1), cylinder(0.1,0.1,0, 0,0,1, 0.06, 2))");
  const Box3 box{Vec3::Constant(-1.3), Vec3::Constant(1.3)};
  const FeGrid coarse = test::uniform_grid(box, 3, shape, 2.6 / 8 / 4);
  const FeGrid fine = test::uniform_grid(box, 3, shape, 2.6 / 8 / 16);
  for (std::size_t i = 0; i < coarse.size(); ++i)
    if (is_cut(coarse.leaf(static_cast<int>(i)).label)) EXPECT_TRUE(is_cut(fine.leaf(static_cast<int>(i)).label));
}

// Components of the face-adjacency graph among discretized leaves of each
// subdomain, counted by breadth-first search.
std::vector<int> oracle_components(const FeGrid& g, const Partition& p) {
  std::vector<int> count(p.n_subdomains, 0);
  std::vector<char> seen(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (seen[i] || !is_discretized(g.leaf(static_cast<int>(i)).label)) continue;
    ++count[p.subdomain[i]];
    std::queue<int> q;
    q.push(static_cast<int>(i));
    seen[i] = 1;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b : g.face_neighbors(a)) {
        if (seen[b] || !is_discretized(g.leaf(b).label) || p.subdomain[b] != p.subdomain[a]) continue;
        seen[b] = 1;
        q.push(b);
      }
    }
  }
  return count;
}

TEST(Partition, SingleSubdomain) {
  const FeGrid g = test::uniform_grid(Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, 3, AnalyticSdf::named("sphere"));
  const Partition p = partition_zcurve(g, 1);
  for (int s : p.subdomain) EXPECT_EQ(s, 0);
  EXPECT_EQ(p.component_count[0], 1);
}

TEST(Partition, UniformActiveGridSplitsEvenly) {
  FeGrid g = test::uniform_grid(kUnitBox, 3, AnalyticSdf::sphere(Vec3::Zero(), 10));
  const Partition p = partition_zcurve(g, 4);
  std::vector<int> count(4, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ++count[p.subdomain[i]];
    if (i > 0) EXPECT_LE(p.subdomain[i - 1], p.subdomain[i]);
  }
  for (int c : count) EXPECT_LE(std::abs(c - 128), 1);
}

TEST(Partition, LoadsWithinOneCellWeight) {
  const FeGrid g = test::uniform_grid(Box3{Vec3::Constant(-1.25), Vec3::Constant(1.25)}, 4, AnalyticSdf::named("sphere"));
  for (int n : {2, 3, 7, 8, 13}) {
    const Partition p = partition_zcurve(g, n, 100, 1);
    double total = 0.0;
    for (long long l : p.load) total += l;
    for (long long l : p.load) EXPECT_LE(std::abs(l - total / n), 100.0);
    const Partition again = partition_zcurve(g, n, 100, 1);
    EXPECT_EQ(p.subdomain, again.subdomain);
  }
}

TEST(Partition, DisconnectedSegmentReportsComponents) {
  FeGrid g = FeGrid::build_base(kUnitBox, 2);
  // Two slabs in the lower half joined only through the upper half.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 c = g.cell_center(static_cast<int>(i));
    const bool slab = c[0] < 0.25 || c[0] > 0.75;
    g.set_label(static_cast<int>(i), (c[2] > 0.5 || slab) ? CellClass::Active : CellClass::Inactive);
  }
  const Partition p = partition_zcurve(g, 2);
  const std::vector<int> oracle = oracle_components(g, p);
  EXPECT_EQ(p.component_count, oracle);
  EXPECT_GE(*std::max_element(oracle.begin(), oracle.end()), 2);
}

TEST(Partition, TooManySubdomainsThrows) {
  const FeGrid g = FeGrid::build_base(kUnitBox, 1);
  EXPECT_THROW(partition_zcurve(g, 9), ConfigError);
}

}  // namespace
}  // namespace trigrid
