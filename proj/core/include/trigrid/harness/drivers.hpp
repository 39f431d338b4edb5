#pragma once

#include "trigrid/harness/pipeline.hpp"

#include <limits>
#include <vector>

namespace trigrid {

// Least-squares slope of log(y) against log(x).
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

// Exact volume and area of named analytic shapes; NaN when unknown.
struct ExactMeasures {
  double volume = std::numeric_limits<double>::quiet_NaN();
  double area = std::numeric_limits<double>::quiet_NaN();
};
ExactMeasures exact_measures(const std::string& source);

struct IntegrateResult {
  double h_q = 0.0;  // spacing actually used
  int r_q = 0;
  double volume = 0.0;
  double area = 0.0;
  double volume_error = 0.0;  // relative; NaN when the exact value is unknown
  double area_error = 0.0;
};
// Decomposes one cubic cell around the geometry with 2^r_q sub-cells per
// axis, r_q the smallest level with spacing <= h_q, and integrates 1 over the
// inside and over the boundary.
IntegrateResult integrate_geometry(const Geometry& geometry, const RunConfig& config, double h_q);

struct ConvergenceRow {
  int level = 0;
  double h_f = 0.0;
  double h_q = 0.0;
  int dofs = 0;
  double l2_relative = 0.0;
  double h1_relative = 0.0;
  int iterations = 0;
};
struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double l2_slope = 0.0;  // over all levels
  double h1_slope = 0.0;
  double l2_last_slope = 0.0;  // between the two finest levels
  double h1_last_slope = 0.0;
};
std::string convergence_csv(const ConvergenceResult& result, int p);

struct AdaptiveStep {
  int step = 0;
  std::size_t leaves = 0;
  int dofs = 0;
  double l2_relative = 0.0;
  double h1_relative = 0.0;
  std::vector<Box3> refined;  // leaves flagged after this step
};

// Subcommands. Each writes its files under config.directory and returns the
// report printed by the CLI.
Report cmd_voxelize(const RunConfig& config);
Report cmd_classify(const RunConfig& config);
Report cmd_integrate(const RunConfig& config, IntegrateResult* out = nullptr);
// Runs config.levels; on solver failure the CSV holds the finished levels
// and the SolverError is rethrown.
Report cmd_convergence(const RunConfig& config, ConvergenceResult* out = nullptr);
Report cmd_adaptive(const RunConfig& config, std::vector<AdaptiveStep>* out = nullptr);
Report cmd_solve(const RunConfig& config, SolveResult* out = nullptr);

// Refines the given fraction of discretized leaves with the largest values
// (ties broken by leaf index). Returns the flags.
std::vector<char> flag_largest(const FeGrid& grid, const std::vector<double>& indicator, double fraction);

}  // namespace trigrid
