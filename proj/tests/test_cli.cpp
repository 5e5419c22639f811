#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "pdbc/cli.hpp"
#include "pdbc/control.hpp"
#include "pdbc/io.hpp"
#include "pdbc/manufactured.hpp"

namespace pdbc {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("pdbc_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& body) {
    const fs::path path = dir_ / "config.toml";
    std::ofstream(path) << "output.dir = \"" << (dir_ / "out").string() << "\"\n" << body;
    return path;
  }

  CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "pdbc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string read(const std::string& name) {
    std::ifstream is(dir_ / "out" / name);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, TimeStudyWritesStateCsv) {
  const fs::path cfg = write_config(R"(
[problem]
id = "smooth-inhomogeneous"
[domain]
n = 4
[study]
axis = "space"
levels = [4, 8]
reference = 32
)");
  const CliRun r = run({"study", cfg.string(), "--axis", "time"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string csv = read("study.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,n,M,h,k,error_state,eoc");
  const auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_EQ(summary["config"]["axis"], "time");
  EXPECT_EQ(summary["levels"].size(), 2u);
}

TEST_F(CliTest, StudyOutputIsDeterministic) {
  const fs::path cfg = write_config(R"(
problem.id = "smooth-inhomogeneous"
domain.n = 4
study.axis = "time"
study.levels = [2, 4]
study.reference = 16
)");
  ASSERT_EQ(run({"study", cfg.string()}).code, cli::kExitOk);
  const std::string first = read("study.csv");
  ASSERT_EQ(run({"study", cfg.string()}).code, cli::kExitOk);
  EXPECT_EQ(read("study.csv"), first);
}

TEST_F(CliTest, MissingAlphaIsValidationError) {
  const fs::path cfg = write_config(R"(
problem.id = "active-box"
domain.n = 2
time.M = 2
)");
  const CliRun r = run({"solve-control", cfg.string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("control.alpha"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedKeysAreNamed) {
  const fs::path cfg = write_config(R"(
problem.id = "active-box"
domain.n = "four"
time.M = 2
control.alpha = 0.1
)");
  CliRun r = run({"solve-control", cfg.string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("domain.n"), std::string::npos) << r.err;

  const fs::path bounds = write_config(R"(
problem.id = "active-box"
domain.n = 2
time.M = 2
control.alpha = 0.1
control.bounds = [1.0, -1.0]
)");
  r = run({"solve-control", bounds.string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("control.bounds"), std::string::npos) << r.err;

  const fs::path levels = write_config(R"(
problem.id = "smooth-inhomogeneous"
study.levels = [4, 6]
study.reference = 24
)");
  r = run({"study", levels.string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("study.levels"), std::string::npos) << r.err;

  const fs::path unknown = write_config("problem.id = \"nope\"\ndomain.n = 2\ntime.M = 2\n");
  r = run({"solve-state", unknown.string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("problem.id"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadCommandLineAndMissingFile) {
  EXPECT_EQ(run({}).code, cli::kExitValidation);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"study", (dir_ / "missing.toml").string()}).code, cli::kExitValidation);
  EXPECT_EQ(run({"study", "x.toml", "--axis", "diagonal"}).code, cli::kExitValidation);
}

TEST_F(CliTest, UnreachableToleranceIsSolverFailure) {
  const fs::path cfg = write_config(R"(
problem.id = "active-box"
domain.n = 2
time.M = 4
control.alpha = 0.1
control.tol = 1e-30
control.max_iters = 3
)");
  const CliRun r = run({"solve-control", cfg.string()});
  EXPECT_EQ(r.code, cli::kExitSolver);
  const auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_EQ(summary["status"], "not-converged");
  ASSERT_TRUE(summary.contains("best_residual"));
  EXPECT_GT(summary["best_residual"].get<double>(), 0.0);
}

TEST_F(CliTest, SolveControlOutputsVerifyPostHoc) {
  const fs::path cfg = write_config(R"(
problem.id = "active-box"
domain.n = 4
time.M = 4
control.alpha = 0.1
control.bounds = [-0.5, 0.5]
)");
  const CliRun r = run({"solve-control", cfg.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_EQ(summary["status"], "ok");

  const ControlSetup setup = manufactured_control_problem("active-box");
  const Discretization d(unit_square_mesh(4), uniform_grid(4, setup.horizon));
  const ReducedProblem rp(d, setup.problem);
  std::ifstream is(dir_ / "out" / "control.csv");
  const BoundaryField u = read_boundary_csv(is, d.grid(), d.mesh());
  const SpaceTimeField y = rp.state(u);
  const double residual = fixed_point_residual(rp, u, rp.adjoint_derivative(y, rp.adjoint(y)));
  EXPECT_LE(residual, summary["tol"].get<double>());
}

TEST_F(CliTest, SolveStateReportsError) {
  const fs::path cfg = write_config("problem.id = \"constant\"\ndomain.n = 2\ntime.M = 3\n");
  const CliRun r = run({"solve-state", cfg.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(read("summary.json"));
  EXPECT_LE(summary["error_state"].get<double>(), 1e-10);
  EXPECT_EQ(read("state.csv").substr(0, 19), "slab,t_m,node,value");
}

}  // namespace
}  // namespace pdbc
