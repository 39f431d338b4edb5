#include "trigrid/harness/pipeline.hpp"

#include "trigrid/fem/solution.hpp"
#include "trigrid/io/vtk.hpp"
#include "trigrid/log.hpp"
#include "trigrid/octree/partition.hpp"
#include "trigrid/sdf/surface.hpp"
#include "trigrid/solver/bddc.hpp"
#include "trigrid/solver/pcg.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace trigrid {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool is_stl(const std::string& source) {
  return source.size() > 4 && (source.ends_with(".stl") || source.ends_with(".STL"));
}

}  // namespace

Geometry::Geometry(const RunConfig& config) {
  std::optional<TriangleSurface> surface;
  if (is_stl(config.source)) {
    surface = read_stl(config.source);
    surface->validate();
    bounds_ = surface->bounds();
  } else {
    analytic_ = config.source.starts_with("csg:") ? AnalyticSdf::parse(config.source.substr(4))
                                                  : AnalyticSdf::named(config.source);
    bounds_ = analytic_->bounds();
  }
  if (config.evaluator == "analytic" && !analytic_) {
    throw ConfigError("geometry.evaluator = analytic needs an analytic source");
  }

  double edge = config.box_edge;
  if (edge <= 0.0) {
    const double extent = bounds_.extent().maxCoeff() * 1.1;
    edge = std::exp2(std::ceil(std::log2(extent)));
  }
  const Vec3 origin = config.box_origin_set
                          ? config.box_origin
                          : Vec3(bounds_.center() - Vec3::Constant(0.5 * edge) + config.box_shift);
  box_ = {origin, origin + Vec3::Constant(edge)};
  if (!box_.contains(bounds_.lo) || !box_.contains(bounds_.hi)) {
    log_warning("FE box does not contain the geometry bounds; the domain is clipped");
  }

  if (config.evaluator == "grid") {
    // Pad by one spacing so every FE corner lies inside the sampled lattice.
    const Box3 domain = box_.expanded(config.h_g);
    sampled_ = std::make_unique<SparseDistanceGrid>(
        surface ? build_from_surface(*surface, config.h_g, config.band_factor, &domain)
                : build_from_analytic(*analytic_, domain, config.h_g, config.band_factor));
  }
}

const ImplicitField& Geometry::field() const {
  if (sampled_) return *sampled_;
  return *analytic_;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void Report::section(const std::string& name) { entries_.emplace_back("[" + name + "]", ""); }
void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::add(const std::string& key, double value) { add(key, format_number(value)); }
void Report::add(const std::string& key, long long value) { add(key, std::to_string(value)); }

std::string Report::str() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : entries_) {
    if (k.front() == '[') {
      if (!first) out << '\n';
      out << k << '\n';
    } else {
      out << k << " = " << v << '\n';
    }
    first = false;
  }
  return out.str();
}

std::string Report::get(const std::string& key) const {
  std::string section;
  for (const auto& [k, v] : entries_) {
    if (k.front() == '[') {
      section = k.substr(1, k.size() - 2);
    } else if (section + "." + k == key) {
      return v;
    }
  }
  return {};
}

Pipeline::Pipeline(const RunConfig& config)
    : config_((config.validate(), config)), geometry_(config_), problem_(manufactured_problem(config_.problem)) {}

ClassifyOptions Pipeline::classify_options() const {
  ClassifyOptions o;
  o.h_sample = config_.effective_h_sample();
  o.cos_theta = config_.cos_theta;
  return o;
}

FeGrid Pipeline::build_grid(int level) const {
  const auto opts = classify_options();
  const ImplicitField& phi = geometry_.field();
  FeGrid grid = FeGrid::build_base(geometry_.box(), std::min(config_.base_refinements, level));
  refine_to_level_in_domain(grid, phi, level, opts);
  if (config_.boundary_refinements > 0) {
    refine_toward_boundary(grid, phi, config_.boundary_refinements, config_.h_min, opts);
  }
  const double h_f = grid.box_edge() / std::exp2(grid.max_leaf_level());
  const double h_q = h_f / std::exp2(config_.r_q);
  if (h_q < phi.resolution()) {
    log_warning("quadrature spacing " + format_number(h_q) + " is below the geometry spacing " +
                format_number(phi.resolution()));
  }
  return grid;
}

SolveResult Pipeline::solve(const FeGrid& grid, const std::filesystem::path* vtk_path) const {
  using clock = std::chrono::steady_clock;
  const ImplicitField& phi = geometry_.field();
  SolveResult r;

  r.leaves = grid.size();
  for (const auto& c : grid.leaves()) {
    if (c.label == CellClass::Active) ++r.active;
    else if (is_cut(c.label)) ++r.cut;
    else ++r.inactive;
  }
  r.h_f = grid.box_edge() / std::exp2(grid.max_leaf_level());

  auto t0 = clock::now();
  CutQuadOptions qopts;
  qopts.r_q = config_.r_q;
  qopts.policy = config_.split_policy == "min-mixed" ? SplitPolicy::MinMixed : SplitPolicy::Consistent;
  qopts.root_tol = config_.root_tol;
  QuadratureDegrees degrees = QuadratureDegrees::for_order(config_.p);
  if (config_.degree > 0) degrees = {config_.degree, config_.degree};
  const CutCellQuadrature quad(grid, phi, qopts, degrees);
  r.inside_volume = quad.total_inside_volume();
  r.surface_area = quad.total_surface_area();

  const LagrangeBasis basis(config_.p);
  const DofMap dofs(grid, basis);
  ConstraintOptions copts;
  copts.stabilize = config_.stabilize;
  copts.epsilon = config_.epsilon;
  const ConstraintMap constraints = build_constraints(grid, dofs, basis, quad, copts);
  r.t_quadrature = seconds_since(t0);
  r.nodes = dofs.node_count();
  r.dofs = constraints.free_count();
  r.hanging = constraints.count(NodeKind::Hanging);
  r.critical = constraints.count(NodeKind::Critical);
  r.void_nodes = constraints.count(NodeKind::Void);
  if (r.dofs == 0) throw GeometryError("the discretization has no free degrees of freedom");

  PoissonData data;
  data.f = problem_.f;
  data.u_dirichlet = problem_.u;
  const Assembler assembler(grid, dofs, basis, constraints, quad, data, config_.effective_gamma0(),
                            config_.penalty == "fixed" ? PenaltyMode::Fixed : PenaltyMode::LocalEigen);

  PcgResult result;
  if (config_.solver == "jacobi-pcg") {
    t0 = clock::now();
    const LinearSystem sys = assembler.assemble();
    r.t_assembly = seconds_since(t0);
    t0 = clock::now();
    const LinearOperator A = [&sys](const Eigen::VectorXd& x, Eigen::VectorXd& y) { sys.A.multiply(x, y); };
    const LinearOperator M = jacobi_operator(sys.A.diagonal());
    r.t_setup = seconds_since(t0);
    t0 = clock::now();
    result = pcg(A, M, sys.b, config_.tol, config_.max_iter);
    r.t_solve = seconds_since(t0);
    r.u_free = result.x;
  } else {
    t0 = clock::now();
    const auto& cells = dofs.cells();
    Partition part =
        partition_zcurve(grid, config_.n_subdomains, config_.weight_active_cut, config_.weight_inactive);
    const std::vector<int> owner = extrapolation_owner(grid, dofs, constraints);
    const std::vector<int> z_subdomain = part.subdomain;
    for (std::size_t leaf = 0; leaf < owner.size(); ++leaf) part.subdomain[leaf] = z_subdomain[owner[leaf]];
    std::vector<std::vector<int>> element_dofs(cells.size());
    std::vector<int> element_subdomain(cells.size());
    for (std::size_t e = 0; e < cells.size(); ++e) {
      element_dofs[e] = assembler.element_dofs(cells[e]);
      element_subdomain[e] = part.subdomain[cells[e]];
    }
    // Extrapolated elements stay joined to their donors in the dual graph.
    std::vector<int> element_of(grid.size(), -1);
    for (std::size_t e = 0; e < cells.size(); ++e) element_of[cells[e]] = static_cast<int>(e);
    std::vector<std::vector<int>> linked(cells.size());
    for (std::size_t e = 0; e < cells.size(); ++e) {
      for (int node : dofs.cell_nodes(cells[e])) {
        for (int d : constraints.donor_leaves(node)) {
          linked[e].push_back(element_of[d]);
          linked[element_of[d]].push_back(static_cast<int>(e));
        }
      }
    }
    std::vector<int> component_of;
    int n_sub = 0;
    const std::vector<int> sub_of = substructure_ids(element_dofs, element_subdomain, SubstructureOptions{}.min_shared_dofs,
                                                     &component_of, &n_sub, &linked);
    std::vector<int> sub_subdomain(n_sub, 0), sub_component(n_sub, 0);
    for (std::size_t e = 0; e < cells.size(); ++e) {
      if (sub_of[e] < 0) continue;
      sub_subdomain[sub_of[e]] = element_subdomain[e];
      sub_component[sub_of[e]] = component_of[e];
    }
    const auto element = [&](int e, ElementBlock& block) {
      ElementSystem el;
      assembler.element(cells[e], el);
      block.dofs = std::move(el.dofs);
      block.K = std::move(el.K);
      block.f = std::move(el.f);
    };
    const SubstructuredSystem system(r.dofs, static_cast<int>(cells.size()), element, sub_of, sub_subdomain,
                                     sub_component);
    r.t_assembly = seconds_since(t0);
    t0 = clock::now();
    std::vector<Vec3> coords(r.dofs);
    for (int f = 0; f < r.dofs; ++f) coords[f] = grid.to_physical(dofs.node_lattice(constraints.free_node(f)));
    const BddcPreconditioner bddc(system, coords);
    r.t_setup = seconds_since(t0);
    r.interface_dofs = system.interface_size();
    r.coarse_size = bddc.coarse_size();
    r.substructures = static_cast<int>(system.substructures().size());
    for (int s = 0; s < r.substructures; ++s) {
      r.substructure_subdomain.push_back(system.substructures()[s].subdomain);
      r.substructure_coarse.push_back(static_cast<int>(bddc.local_coarse(s).size()));
    }
    std::map<std::pair<int, int>, int> faces_between;
    for (const Glob& g : bddc.globs()) {
      if (!g.face()) continue;
      const int a = r.substructure_subdomain[g.substructures[0]];
      const int b = r.substructure_subdomain[g.substructures[1]];
      ++faces_between[{std::min(a, b), std::max(a, b)}];
    }
    for (const auto& [pair, count] : faces_between)
      if (count > 1) r.repeated_faces += count;
    t0 = clock::now();
    const LinearOperator S = [&system](const Eigen::VectorXd& x, Eigen::VectorXd& y) { system.schur_apply(x, y); };
    const LinearOperator M = [&bddc](const Eigen::VectorXd& x, Eigen::VectorXd& y) { bddc.apply(x, y); };
    result = pcg(S, M, system.schur_rhs(), config_.tol, config_.max_iter);
    r.u_free = system.recover(result.x);
    r.t_solve = seconds_since(t0);
  }
  r.iterations = result.iterations;
  r.converged = result.converged;
  r.relative_residual = result.relative_residual;
  r.history = result.history;

  const FeSolution uh(grid, dofs, basis, constraints, r.u_free);
  r.u_nodes = uh.node_values();
  const ErrorNorms norms = error_norms(uh, grid, dofs, quad, problem_.u, problem_.grad_u, &r.cell_h1_error_sq);
  r.l2_relative = norms.l2_relative();
  r.h1_relative = norms.h1_relative();

  if (vtk_path) write_solution_vtk(*vtk_path, grid, dofs, uh, quad);
  if (!r.converged) {
    throw SolverError("solver did not reach tolerance " + format_number(config_.tol) + " within " +
                      std::to_string(config_.max_iter) + " iterations (relative residual " +
                      format_number(r.relative_residual) + ")");
  }
  return r;
}

void add_solve_report(Report& report, const SolveResult& r, bool timings) {
  report.section("mesh");
  report.add("leaves", r.leaves);
  report.add("active", r.active);
  report.add("cut", r.cut);
  report.add("inactive", r.inactive);
  report.add("elements", r.active + r.cut);
  report.add("h_f", r.h_f);
  report.add("nodes", r.nodes);
  report.add("dofs", r.dofs);
  report.add("hanging", r.hanging);
  report.add("critical", r.critical);
  report.add("void", r.void_nodes);
  report.add("inside_volume", r.inside_volume);
  report.add("surface_area", r.surface_area);
  report.section("solver");
  report.add("iterations", r.iterations);
  report.add("converged", std::string(r.converged ? "true" : "false"));
  report.add("relative_residual", r.relative_residual);
  report.add("substructures", r.substructures);
  report.add("interface_dofs", r.interface_dofs);
  report.add("coarse_size", r.coarse_size);
  report.add("repeated_faces", r.repeated_faces);
  report.section("errors");
  report.add("l2_relative", r.l2_relative);
  report.add("h1_relative", r.h1_relative);
  if (timings) {
    report.section("timing");
    report.add("quadrature_s", r.t_quadrature);
    report.add("assembly_s", r.t_assembly);
    report.add("setup_s", r.t_setup);
    report.add("solve_s", r.t_solve);
  }
}

}  // namespace trigrid
