#include "trigrid/cutquad/decomposition.hpp"
#include "trigrid/harness/pipeline.hpp"
#include "trigrid/sdf/analytic.hpp"
#include "trigrid/sdf/distance_grid.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace trigrid;

const AnalyticSdf& unit_sphere() {
  static const AnalyticSdf s = AnalyticSdf::sphere(Vec3::Zero(), 1.0);
  return s;
}

// Narrow-band sampling of the unit sphere at h_g = 1 / range(0).
void BM_SampleSphereBand(benchmark::State& state) {
  const double h_g = 1.0 / static_cast<double>(state.range(0));
  const Box3 domain{Vec3::Constant(-1.5), Vec3::Constant(1.5)};
  for (auto _ : state) {
    SparseDistanceGrid g = build_from_analytic(unit_sphere(), domain, h_g, 3);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_SampleSphereBand)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// Quadrature octree, six-tet split and marching tetrahedra for one cut cell.
void BM_DecomposeCutCell(benchmark::State& state) {
  CutQuadOptions o;
  o.r_q = static_cast<int>(state.range(0));
  const Box3 cell{Vec3(0.55, 0.5, 0.45), Vec3(0.8, 0.75, 0.7)};
  std::vector<VolumePoint> volume;
  std::vector<SurfacePoint> surface;
  for (auto _ : state) {
    const CellDecomposition d = decompose_cell(cell, unit_sphere(), o);
    emit_quadrature(d, QuadratureDegrees::for_order(1), volume, &surface);
    benchmark::DoNotOptimize(volume.data());
  }
}
BENCHMARK(BM_DecomposeCutCell)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

// Full sphere solve: discretization plus Jacobi-PCG or BDDC-PCG.
void BM_SolveSphere(benchmark::State& state, const char* solver) {
  RunConfig c;
  c.evaluator = "analytic";
  c.uniform_level = static_cast<int>(state.range(0));
  c.solver = solver;
  c.tol = 1e-8;
  const Pipeline pipeline(c);
  const FeGrid grid = pipeline.build_grid(c.uniform_level);
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = pipeline.solve(grid);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.u_free.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK_CAPTURE(BM_SolveSphere, jacobi, "jacobi-pcg")->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveSphere, bddc, "bddc")->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
