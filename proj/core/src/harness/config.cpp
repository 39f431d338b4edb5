#include "trigrid/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace trigrid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto t = trim(s);
  // Accept simple fractions such as 1/128.
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    return parse_double(key, t.substr(0, slash)) / parse_double(key, t.substr(slash + 1));
  }
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& s) {
  int v = 0;
  const auto t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  const auto t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

Vec3 parse_vec(const std::string& key, const std::string& s) {
  const auto items = split_list(s);
  if (items.size() != 3) throw ConfigError(key + ": expected x,y,z, got '" + s + "'");
  return {parse_double(key, items[0]), parse_double(key, items[1]), parse_double(key, items[2])};
}

std::string format_vec(const Vec3& v) {
  return format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]);
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class M>
Field real(M member) {
  return {[member](const RunConfig& c) { return format_double(c.*member); },
          [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_double(k, v); }};
}

template <class M>
Field integer(M member) {
  return {[member](const RunConfig& c) { return std::to_string(c.*member); },
          [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_int(k, v); }};
}

template <class M>
Field boolean(M member) {
  return {[member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_bool(k, v); }};
}

template <class M>
Field text(M member) {
  return {[member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string&, const std::string& v) { c.*member = trim(v); }};
}

// Ordered registry; the order is the serialization order.
const std::vector<std::pair<std::string, Field>>& registry() {
  static const std::vector<std::pair<std::string, Field>> fields = [] {
    std::vector<std::pair<std::string, Field>> f;
    f.emplace_back("geometry.source", text(&RunConfig::source));
    f.emplace_back("geometry.evaluator", text(&RunConfig::evaluator));
    f.emplace_back("geometry.h_g", real(&RunConfig::h_g));
    f.emplace_back("geometry.band_factor", integer(&RunConfig::band_factor));
    f.emplace_back("grid.box_edge", real(&RunConfig::box_edge));
    f.emplace_back("grid.box_shift",
                   Field{[](const RunConfig& c) { return format_vec(c.box_shift); },
                         [](RunConfig& c, const std::string& k, const std::string& v) { c.box_shift = parse_vec(k, v); }});
    f.emplace_back("grid.box_origin",
                   Field{[](const RunConfig& c) { return c.box_origin_set ? format_vec(c.box_origin) : std::string("auto"); },
                         [](RunConfig& c, const std::string& k, const std::string& v) {
                           if (trim(v) == "auto") {
                             c.box_origin_set = false;
                             c.box_origin = Vec3::Zero();
                           } else {
                             c.box_origin_set = true;
                             c.box_origin = parse_vec(k, v);
                           }
                         }});
    f.emplace_back("grid.base_refinements", integer(&RunConfig::base_refinements));
    f.emplace_back("grid.uniform_level", integer(&RunConfig::uniform_level));
    f.emplace_back("grid.boundary_refinements", integer(&RunConfig::boundary_refinements));
    f.emplace_back("grid.h_min", real(&RunConfig::h_min));
    f.emplace_back("grid.h_sample", real(&RunConfig::h_sample));
    f.emplace_back("grid.cos_theta", real(&RunConfig::cos_theta));
    f.emplace_back("quadrature.r_q", integer(&RunConfig::r_q));
    f.emplace_back("quadrature.split_policy", text(&RunConfig::split_policy));
    f.emplace_back("quadrature.degree", integer(&RunConfig::degree));
    f.emplace_back("quadrature.root_tol", real(&RunConfig::root_tol));
    f.emplace_back("quadrature.h_q", real(&RunConfig::h_q));
    f.emplace_back("discretization.p", integer(&RunConfig::p));
    f.emplace_back("discretization.gamma0", real(&RunConfig::gamma0));
    f.emplace_back("discretization.penalty", text(&RunConfig::penalty));
    f.emplace_back("discretization.epsilon", real(&RunConfig::epsilon));
    f.emplace_back("discretization.stabilize", boolean(&RunConfig::stabilize));
    f.emplace_back("discretization.problem", text(&RunConfig::problem));
    f.emplace_back("partition.n_subdomains", integer(&RunConfig::n_subdomains));
    f.emplace_back("partition.weight_active_cut", integer(&RunConfig::weight_active_cut));
    f.emplace_back("partition.weight_inactive", integer(&RunConfig::weight_inactive));
    f.emplace_back("solver.solver", text(&RunConfig::solver));
    f.emplace_back("solver.tol", real(&RunConfig::tol));
    f.emplace_back("solver.max_iter", integer(&RunConfig::max_iter));
    f.emplace_back("adaptive.steps", integer(&RunConfig::steps));
    f.emplace_back("adaptive.fraction", real(&RunConfig::fraction));
    f.emplace_back("convergence.levels",
                   Field{[](const RunConfig& c) {
                           std::string s;
                           for (std::size_t i = 0; i < c.levels.size(); ++i) {
                             if (i) s += ",";
                             s += std::to_string(c.levels[i]);
                           }
                           return s;
                         },
                         [](RunConfig& c, const std::string& k, const std::string& v) {
                           c.levels.clear();
                           for (const auto& item : split_list(v)) {
                             if (!item.empty()) c.levels.push_back(parse_int(k, item));
                           }
                         }});
    f.emplace_back("output.directory", text(&RunConfig::directory));
    f.emplace_back("output.write_vtk", boolean(&RunConfig::write_vtk));
    f.emplace_back("output.timings", boolean(&RunConfig::timings));
    return f;
  }();
  return fields;
}

const Field& lookup(const std::string& key) {
  for (const auto& [name, field] : registry()) {
    if (name == key) return field;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void RunConfig::validate() const {
  require(!source.empty(), "geometry.source must not be empty");
  require(evaluator == "grid" || evaluator == "analytic", "geometry.evaluator must be grid or analytic");
  require(h_g > 0.0, "geometry.h_g must be positive");
  require(band_factor >= 1, "geometry.band_factor must be at least 1");
  require(box_edge >= 0.0, "grid.box_edge must be non-negative");
  require(base_refinements >= 0 && base_refinements <= 12, "grid.base_refinements must be in [0, 12]");
  require(uniform_level >= 0 && uniform_level <= 12, "grid.uniform_level must be in [0, 12]");
  require(boundary_refinements >= 0, "grid.boundary_refinements must be non-negative");
  require(h_min >= 0.0, "grid.h_min must be non-negative");
  require(cos_theta >= -1.0 && cos_theta <= 1.0, "grid.cos_theta must be in [-1, 1]");
  require(r_q >= 0 && r_q <= 6, "quadrature.r_q must be in [0, 6]");
  require(split_policy == "min-mixed" || split_policy == "consistent",
          "quadrature.split_policy must be min-mixed or consistent");
  require(degree >= 0, "quadrature.degree must be non-negative");
  require(root_tol >= 0.0, "quadrature.root_tol must be non-negative");
  require(h_q >= 0.0, "quadrature.h_q must be non-negative");
  require(p == 1 || p == 2, "discretization.p must be 1 or 2");
  require(gamma0 >= 0.0, "discretization.gamma0 must be non-negative");
  require(penalty == "local" || penalty == "fixed", "discretization.penalty must be local or fixed");
  require(epsilon >= 0.0 && epsilon < 1.0, "discretization.epsilon must be in [0, 1)");
  require(problem == "cos-x3" || problem == "internal-layer" || problem == "linear" || problem == "quadratic",
          "discretization.problem must be cos-x3, internal-layer, linear or quadratic");
  require(n_subdomains >= 1, "partition.n_subdomains must be at least 1");
  require(weight_active_cut >= 1 && weight_inactive >= 0, "partition weights must be positive");
  require(solver == "jacobi-pcg" || solver == "bddc", "solver.solver must be jacobi-pcg or bddc");
  require(tol > 0.0, "solver.tol must be positive");
  require(max_iter >= 1, "solver.max_iter must be at least 1");
  require(steps >= 0, "adaptive.steps must be non-negative");
  require(fraction >= 0.0 && fraction <= 1.0, "adaptive.fraction must be in [0, 1]");
  for (int l : levels) require(l >= 0 && l <= 12, "convergence.levels must be in [0, 12]");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : registry()) keys.push_back(name);
  return keys;
}

std::string config_get(const RunConfig& config, const std::string& key) { return lookup(key).get(config); }

void config_set(RunConfig& config, const std::string& key, const std::string& value) {
  lookup(key).set(config, key, value);
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(number) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(number) + ": key outside a section");
    config_set(config, section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& [name, field] : registry()) {
    const auto dot = name.find('.');
    const auto s = name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << name.substr(dot + 1) << " = " << field.get(config) << '\n';
  }
  return out.str();
}

}  // namespace trigrid
