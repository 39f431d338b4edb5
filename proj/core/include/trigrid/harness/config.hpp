#pragma once

#include "trigrid/common.hpp"

#include <string>
#include <vector>

namespace trigrid {

// All tunables of a run. Serialized as key = value lines grouped in
// [section] blocks; every key has a default so a partial file is valid.
struct RunConfig {
  // [geometry]
  std::string source = "sphere";  // named analytic shape, "csg:<expression>" or an STL path
  std::string evaluator = "grid";  // "grid" samples the narrow band; "analytic" uses the closed form
  double h_g = 1.0 / 64.0;
  int band_factor = 3;

  // [grid]
  double box_edge = 0.0;  // 0 picks the smallest power of two above 1.1 x the geometry extent
  Vec3 box_shift = Vec3::Constant(0.03);  // added to the centred box origin
  bool box_origin_set = false;
  Vec3 box_origin = Vec3::Zero();  // explicit origin, overrides centring and shift
  int base_refinements = 2;
  int uniform_level = 4;  // leaves that may meet the domain are refined to this level
  int boundary_refinements = 0;
  double h_min = 0.0;
  double h_sample = -1.0;  // supersampling spacing; -1 uses h_g, 0 disables
  double cos_theta = 0.3;

  // [quadrature]
  int r_q = 3;
  std::string split_policy = "consistent";  // or "min-mixed"
  int degree = 0;  // 0 uses 2p
  double root_tol = 0.0;
  double h_q = 0.0;  // integrate command: target quadrature spacing

  // [discretization]
  int p = 1;
  double gamma0 = 0.0;  // 0 uses 10 for p = 1 and 40 for p = 2
  std::string penalty = "local";  // "local": max(gamma0 / h, local eigenvalue bound); "fixed": gamma0 / h
  double epsilon = 0.125;
  bool stabilize = true;
  std::string problem = "cos-x3";  // cos-x3, internal-layer, linear, quadratic

  // [partition]
  int n_subdomains = 8;
  int weight_active_cut = 100;
  int weight_inactive = 1;

  // [solver]
  std::string solver = "jacobi-pcg";  // or "bddc"
  double tol = 1e-6;
  int max_iter = 10000;

  // [adaptive]
  int steps = 2;
  double fraction = 0.15;

  // [convergence]
  std::vector<int> levels = {3, 4, 5};

  // [output]
  std::string directory = "out";
  bool write_vtk = true;
  bool timings = true;

  bool operator==(const RunConfig&) const = default;

  double effective_gamma0() const { return gamma0 > 0.0 ? gamma0 : (p == 1 ? 10.0 : 40.0); }
  double effective_h_sample() const { return h_sample < 0.0 ? h_g : h_sample; }

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Key names are "section.key".
std::vector<std::string> config_keys();
std::string config_get(const RunConfig& config, const std::string& key);
// Throws ConfigError on unknown keys or malformed values.
void config_set(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace trigrid
