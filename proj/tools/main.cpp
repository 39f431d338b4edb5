#include "trigrid/harness/drivers.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using trigrid::RunConfig;

// Each configuration key becomes a flag --<section>.<key> on every subcommand;
// flags override values read from --config.
struct Overrides {
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App& app, Overrides& overrides, std::string& config_path) {
  app.add_option("-c,--config", config_path, "Configuration file (key = value with [sections])");
  for (const auto& key : trigrid::config_keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides.values[key] = v; },
        "default: " + trigrid::config_get(RunConfig{}, key));
  }
}

RunConfig resolve(const std::string& config_path, const Overrides& overrides) {
  RunConfig config = config_path.empty() ? RunConfig{} : trigrid::load_config(config_path);
  for (const auto& [k, v] : overrides.values) trigrid::config_set(config, k, v);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Immersed finite element Poisson solver on sparse distance fields and octrees"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::string config_path;
    Overrides overrides;
  };
  std::map<std::string, Command> commands;
  const std::pair<const char*, const char*> names[] = {
      {"voxelize", "Sample the narrow-band distance field and report its storage"},
      {"classify", "Build and classify the FE octree and partition it"},
      {"integrate", "Integrate volume and surface of the geometry at spacing h_q"},
      {"convergence", "Run the pipeline on every level of convergence.levels"},
      {"adaptive", "Refine by the exact H1 error indicator and re-solve"},
      {"solve", "Full pipeline with solution VTK and run report"},
  };
  for (const auto& [name, help] : names) {
    auto& cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    add_config_flags(*cmd.app, cmd.overrides, cmd.config_path);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      const RunConfig config = resolve(cmd.config_path, cmd.overrides);
      trigrid::Report report;
      if (name == "voxelize") report = trigrid::cmd_voxelize(config);
      else if (name == "classify") report = trigrid::cmd_classify(config);
      else if (name == "integrate") report = trigrid::cmd_integrate(config);
      else if (name == "convergence") report = trigrid::cmd_convergence(config);
      else if (name == "adaptive") report = trigrid::cmd_adaptive(config);
      else report = trigrid::cmd_solve(config);
      std::cout << report.str();
    }
  } catch (const trigrid::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const trigrid::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
