#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

#ifdef TRIGRID_CLI_PATH

int run(const std::string& args) {
  const std::string cmd = std::string(TRIGRID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("trigrid_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

TEST(Cli, SuccessfulRunExitsWithZero) {
  const std::string dir = out_dir("ok");
  EXPECT_EQ(run("solve --geometry.evaluator analytic --grid.uniform_level 3 --quadrature.r_q 1 --output.write_vtk false "
                "--output.directory " + dir),
            0);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / "report.txt"));
}

TEST(Cli, InvalidConfigurationExitsWithTwo) {
  EXPECT_EQ(run("solve --discretization.p 5 --output.directory " + out_dir("bad_p")), 2);
  EXPECT_EQ(run("solve --no-such-flag 1"), 2);
  EXPECT_EQ(run("integrate --quadrature.h_q 0 --output.directory " + out_dir("bad_hq")), 2);
}

TEST(Cli, SolverFailureExitsWithThree) {
  EXPECT_EQ(run("solve --geometry.evaluator analytic --grid.uniform_level 3 --solver.max_iter 2 --solver.tol 1e-12 "
                "--output.write_vtk false --output.directory " + out_dir("no_conv")),
            3);
}

#endif

}  // namespace
