#include "trigrid/harness/drivers.hpp"

#include "trigrid/io/vtk.hpp"
#include "trigrid/octree/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace trigrid {

namespace {

std::filesystem::path output_dir(const RunConfig& config) {
  std::filesystem::path dir(config.directory);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

Report start_report(const RunConfig& config, const std::string& command) {
  Report report;
  report.section("run");
  report.add("command", command);
  std::istringstream in(serialize_config(config));
  std::string line;
  // Echo the full configuration, defaults included.
  std::string section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      report.section("config." + section);
      continue;
    }
    const auto eq = line.find(" = ");
    report.add(line.substr(0, eq), line.substr(eq + 3));
  }
  return report;
}

}  // namespace

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExactMeasures exact_measures(const std::string& source) {
  ExactMeasures m;
  if (source == "sphere") {
    m.volume = 4.0 * std::numbers::pi / 3.0;
    m.area = 4.0 * std::numbers::pi;
  } else if (source == "unit-cube") {
    m.volume = 1.0;
    m.area = 6.0;
  }
  return m;
}

IntegrateResult integrate_geometry(const Geometry& geometry, const RunConfig& config, double h_q) {
  if (!(h_q > 0.0)) throw ConfigError("quadrature.h_q must be positive for integrate");
  const double extent = geometry.bounds().extent().maxCoeff() * 1.1;
  const int r = std::max(0, static_cast<int>(std::ceil(std::log2(extent / h_q) - 1e-12)));
  if (r > 6) throw ConfigError("quadrature.h_q needs more than 6 sub-levels over the geometry");
  IntegrateResult res;
  res.r_q = r;
  const double edge = h_q * std::exp2(r);
  res.h_q = h_q;
  const Vec3 lo = geometry.bounds().center() - Vec3::Constant(0.5 * edge) + config.box_shift;
  CutQuadOptions opts;
  opts.r_q = r;
  opts.policy = config.split_policy == "min-mixed" ? SplitPolicy::MinMixed : SplitPolicy::Consistent;
  opts.root_tol = config.root_tol;
  opts.lattice_origin = lo;
  const CellDecomposition dec = decompose_cell({lo, lo + Vec3::Constant(edge)}, geometry.field(), opts);
  res.volume = dec.inside_volume();
  res.area = dec.surface_area();
  const ExactMeasures exact = exact_measures(config.source);
  res.volume_error = std::abs(res.volume - exact.volume) / exact.volume;
  res.area_error = std::abs(res.area - exact.area) / exact.area;
  return res;
}

std::string convergence_csv(const ConvergenceResult& result, int p) {
  std::ostringstream out;
  out << "h_f,h_q,p,dofs,l2_rel,h1_rel\n";
  for (const auto& row : result.rows) {
    out << format_number(row.h_f) << ',' << format_number(row.h_q) << ',' << p << ',' << row.dofs << ','
        << format_number(row.l2_relative) << ',' << format_number(row.h1_relative) << '\n';
  }
  return out.str();
}

std::vector<char> flag_largest(const FeGrid& grid, const std::vector<double>& indicator, double fraction) {
  std::vector<int> cells;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    if (is_discretized(grid.leaf(i).label)) cells.push_back(i);
  }
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cells.size())));
  std::stable_sort(cells.begin(), cells.end(), [&](int a, int b) { return indicator[a] > indicator[b]; });
  std::vector<char> flags(grid.size(), 0);
  for (std::size_t k = 0; k < count; ++k) flags[cells[k]] = 1;
  return flags;
}

Report cmd_voxelize(const RunConfig& config) {
  RunConfig c = config;
  c.evaluator = "grid";
  c.validate();
  const Geometry geometry(c);
  const SparseDistanceGrid& band = *geometry.sampled();
  Report report = start_report(c, "voxelize");
  report.section("band");
  const auto& n = band.node_counts();
  report.add("lattice_nodes", static_cast<long long>(n[0]) * n[1] * n[2]);
  report.add("stored_blocks", band.block_count());
  constexpr int B = SparseDistanceGrid::kBlock;
  report.add("stored_nodes", band.block_count() * B * B * B);
  report.add("stored_bytes", band.block_count() * B * B * B * sizeof(double));
  report.add("band", band.band());
  const auto dir = output_dir(c);
  if (c.write_vtk) report.add("vtk_files", write_band_vtk(dir / "band", band));
  write_text(dir / "report.txt", report.str());
  return report;
}

Report cmd_classify(const RunConfig& config) {
  const Pipeline pipeline(config);
  const FeGrid grid = pipeline.build_grid(config.uniform_level);
  const Partition part =
      partition_zcurve(grid, config.n_subdomains, config.weight_active_cut, config.weight_inactive);
  Report report = start_report(pipeline.config(), "classify");
  report.section("grid");
  std::size_t counts[5] = {};
  for (const auto& c : grid.leaves()) ++counts[static_cast<int>(c.label)];
  report.add("leaves", grid.size());
  report.add("max_level", grid.max_leaf_level());
  report.add("active", counts[static_cast<int>(CellClass::Active)]);
  report.add("inactive", counts[static_cast<int>(CellClass::Inactive)]);
  report.add("cut_ordinary", counts[static_cast<int>(CellClass::CutOrdinary)]);
  report.add("cut_extraordinary", counts[static_cast<int>(CellClass::CutExtraordinary)]);
  report.add("balanced", std::string(grid.is_balanced() ? "true" : "false"));
  report.section("partition");
  for (int s = 0; s < part.n_subdomains; ++s) {
    report.add("subdomain_" + std::to_string(s),
               "load " + std::to_string(part.load[s]) + ", components " + std::to_string(part.component_count[s]));
  }
  const auto dir = output_dir(config);
  if (config.write_vtk) write_grid_vtk(dir / "grid.vtk", grid, &part);
  write_text(dir / "report.txt", report.str());
  return report;
}

Report cmd_integrate(const RunConfig& config, IntegrateResult* out) {
  config.validate();
  const Geometry geometry(config);
  const IntegrateResult res = integrate_geometry(geometry, config, config.h_q);
  Report report = start_report(config, "integrate");
  report.section("integrate");
  report.add("h_q", res.h_q);
  report.add("r_q", res.r_q);
  report.add("volume", res.volume);
  report.add("area", res.area);
  report.add("volume_relative_error", res.volume_error);
  report.add("area_relative_error", res.area_error);
  write_text(output_dir(config) / "report.txt", report.str());
  if (out) *out = res;
  return report;
}

Report cmd_convergence(const RunConfig& config, ConvergenceResult* out) {
  if (config.levels.size() < 3) throw ConfigError("convergence.levels needs at least 3 levels");
  const Pipeline pipeline(config);
  const auto dir = output_dir(config);
  ConvergenceResult result;
  for (int level : config.levels) {
    const FeGrid grid = pipeline.build_grid(level);
    SolveResult r;
    try {
      r = pipeline.solve(grid);
    } catch (const SolverError&) {
      write_text(dir / "convergence.csv", convergence_csv(result, config.p));
      throw;
    }
    ConvergenceRow row;
    row.level = level;
    row.h_f = r.h_f;
    row.h_q = r.h_f / std::exp2(config.r_q);
    row.dofs = r.dofs;
    row.l2_relative = r.l2_relative;
    row.h1_relative = r.h1_relative;
    row.iterations = r.iterations;
    result.rows.push_back(row);
  }
  std::vector<double> h, l2, h1;
  for (const auto& row : result.rows) {
    h.push_back(row.h_f);
    l2.push_back(row.l2_relative);
    h1.push_back(row.h1_relative);
  }
  result.l2_slope = fitted_slope(h, l2);
  result.h1_slope = fitted_slope(h, h1);
  const std::size_t n = h.size();
  const std::vector<double> h_last(h.end() - 2, h.end());
  result.l2_last_slope = fitted_slope(h_last, {l2[n - 2], l2[n - 1]});
  result.h1_last_slope = fitted_slope(h_last, {h1[n - 2], h1[n - 1]});
  write_text(dir / "convergence.csv", convergence_csv(result, config.p));

  Report report = start_report(pipeline.config(), "convergence");
  report.section("convergence");
  for (const auto& row : result.rows) {
    report.add("level_" + std::to_string(row.level),
               "h_f " + format_number(row.h_f) + ", dofs " + std::to_string(row.dofs) + ", l2 " +
                   format_number(row.l2_relative) + ", h1 " + format_number(row.h1_relative) + ", iterations " +
                   std::to_string(row.iterations));
  }
  report.add("l2_slope", result.l2_slope);
  report.add("h1_slope", result.h1_slope);
  report.add("l2_last_slope", result.l2_last_slope);
  report.add("h1_last_slope", result.h1_last_slope);
  write_text(dir / "report.txt", report.str());
  if (out) *out = result;
  return report;
}

Report cmd_adaptive(const RunConfig& config, std::vector<AdaptiveStep>* out) {
  const Pipeline pipeline(config);
  const auto dir = output_dir(config);
  FeGrid grid = pipeline.build_grid(config.uniform_level);
  std::vector<AdaptiveStep> steps;
  std::ostringstream csv;
  csv << "step,leaves,dofs,l2_rel,h1_rel\n";
  for (int s = 0; s <= config.steps; ++s) {
    const SolveResult r = pipeline.solve(grid);
    AdaptiveStep step;
    step.step = s;
    step.leaves = grid.size();
    step.dofs = r.dofs;
    step.l2_relative = r.l2_relative;
    step.h1_relative = r.h1_relative;
    csv << s << ',' << step.leaves << ',' << step.dofs << ',' << format_number(step.l2_relative) << ','
        << format_number(step.h1_relative) << '\n';
    if (s < config.steps) {
      const auto flags = flag_largest(grid, r.cell_h1_error_sq, config.fraction);
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) step.refined.push_back(grid.cell_box(static_cast<int>(i)));
      }
      if (!step.refined.empty()) {
        grid.refine(flags);
        classify(grid, pipeline.geometry().field(), pipeline.classify_options());
      }
    }
    steps.push_back(std::move(step));
  }
  write_text(dir / "adaptive.csv", csv.str());
  Report report = start_report(pipeline.config(), "adaptive");
  report.section("adaptive");
  for (const auto& st : steps) {
    report.add("step_" + std::to_string(st.step),
               "leaves " + std::to_string(st.leaves) + ", dofs " + std::to_string(st.dofs) + ", l2 " +
                   format_number(st.l2_relative) + ", h1 " + format_number(st.h1_relative) + ", refined " +
                   std::to_string(st.refined.size()));
  }
  write_text(dir / "report.txt", report.str());
  if (out) *out = std::move(steps);
  return report;
}

Report cmd_solve(const RunConfig& config, SolveResult* out) {
  const Pipeline pipeline(config);
  const auto dir = output_dir(config);
  const FeGrid grid = pipeline.build_grid(config.uniform_level);
  const std::filesystem::path vtk = dir / "solution.vtk";
  Report report = start_report(pipeline.config(), "solve");
  SolveResult r = pipeline.solve(grid, config.write_vtk ? &vtk : nullptr);
  std::ostringstream hist;
  hist << "iteration,relative_residual\n";
  for (std::size_t i = 0; i < r.history.size(); ++i) hist << i << ',' << format_number(r.history[i]) << '\n';
  write_text(dir / "residual_history.csv", hist.str());
  add_solve_report(report, r, config.timings);
  write_text(dir / "report.txt", report.str());
  if (out) *out = std::move(r);
  return report;
}

}  // namespace trigrid
