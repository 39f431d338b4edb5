#pragma once

#include "trigrid/harness/config.hpp"
#include "trigrid/harness/problems.hpp"
#include "trigrid/octree/classify.hpp"
#include "trigrid/sdf/analytic.hpp"
#include "trigrid/sdf/distance_grid.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace trigrid {

// Geometry input and the field evaluator the pipeline runs on.
class Geometry {
 public:
  // Loads the source, fixes the FE box and, for the grid evaluator, samples
  // the narrow band over that box.
  explicit Geometry(const RunConfig& config);

  const ImplicitField& field() const;
  // Bounds of the domain (analytic bounds or STL bounding box).
  const Box3& bounds() const { return bounds_; }
  // Cubic FE box.
  const Box3& box() const { return box_; }
  const SparseDistanceGrid* sampled() const { return sampled_.get(); }
  const AnalyticSdf* analytic() const { return analytic_ ? &*analytic_ : nullptr; }

 private:
  std::optional<AnalyticSdf> analytic_;
  std::unique_ptr<SparseDistanceGrid> sampled_;
  Box3 bounds_;
  Box3 box_;
};

// Ordered key = value report; sections keep insertion order.
class Report {
 public:
  void section(const std::string& name);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, std::size_t value) { add(key, static_cast<long long>(value)); }
  std::string str() const;
  // Value of "section.key" or empty.
  std::string get(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // "[section]" markers interleaved
};

std::string format_number(double v);

struct SolveResult {
  // Mesh
  std::size_t leaves = 0;
  std::size_t active = 0;
  std::size_t cut = 0;
  std::size_t inactive = 0;
  double h_f = 0.0;
  int nodes = 0;
  int dofs = 0;
  int hanging = 0;
  int critical = 0;
  int void_nodes = 0;
  double inside_volume = 0.0;
  double surface_area = 0.0;
  // Solver
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
  std::vector<double> history;
  int interface_dofs = 0;
  int coarse_size = 0;
  int substructures = 0;
  std::vector<int> substructure_subdomain;  // per substructure
  std::vector<int> substructure_coarse;     // coarse DOFs touching each substructure
  // Faces whose pair of subdomains also meets across another face, i.e.
  // faces split by subdomain fragmentation.
  int repeated_faces = 0;
  // Errors
  double l2_relative = 0.0;
  double h1_relative = 0.0;
  std::vector<double> cell_h1_error_sq;  // per leaf
  // Timings in seconds
  double t_quadrature = 0.0;
  double t_assembly = 0.0;
  double t_setup = 0.0;
  double t_solve = 0.0;
  // Free coefficients and node values of the solution
  Eigen::VectorXd u_free;
  Eigen::VectorXd u_nodes;
};

class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config);

  const RunConfig& config() const { return config_; }
  const Geometry& geometry() const { return geometry_; }
  const ManufacturedProblem& problem() const { return problem_; }
  ClassifyOptions classify_options() const;

  // Base grid refined uniformly to `level` inside the domain, then toward
  // the boundary; classified on return.
  FeGrid build_grid(int level) const;

  // Discretizes and solves on a classified grid. Writes the solution VTK
  // when `vtk_path` is given. Throws SolverError when the solver does not
  // converge.
  SolveResult solve(const FeGrid& grid, const std::filesystem::path* vtk_path = nullptr) const;

 private:
  RunConfig config_;
  Geometry geometry_;
  ManufacturedProblem problem_;
};

void add_solve_report(Report& report, const SolveResult& result, bool timings);

}  // namespace trigrid
