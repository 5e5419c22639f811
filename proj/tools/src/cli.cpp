#include "pdbc/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "toml.hpp"

#include "pdbc/control.hpp"
#include "pdbc/error.hpp"
#include "pdbc/io.hpp"
#include "pdbc/manufactured.hpp"
#include "pdbc/study.hpp"
#include "pdbc/version.hpp"

namespace pdbc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(fmt::format("{}: {}", key, what)) {}
};

// Typed access to the TOML config; every failure names the key.
class Config {
 public:
  explicit Config(toml::table table) : table_(std::move(table)) {}

  bool has(std::string_view key) const { return static_cast<bool>(table_.at_path(key)); }

  std::optional<double> real(std::string_view key) const {
    const auto node = table_.at_path(key);
    if (!node) return std::nullopt;
    if (!node.is_number()) throw ConfigError(std::string(key), "expected a number");
    return node.value<double>();
  }

  double positive_real(std::string_view key, std::optional<double> fallback = std::nullopt) const {
    const std::optional<double> v = real(key);
    if (!v && !fallback) throw ConfigError(std::string(key), "missing required key");
    const double out = v ? *v : *fallback;
    if (!(out > 0.0)) throw ConfigError(std::string(key), "must be positive");
    return out;
  }

  std::optional<int> integer(std::string_view key) const {
    const auto node = table_.at_path(key);
    if (!node) return std::nullopt;
    if (!node.is_integer()) throw ConfigError(std::string(key), "expected an integer");
    return static_cast<int>(*node.value<std::int64_t>());
  }

  int positive_integer(std::string_view key, std::optional<int> fallback = std::nullopt) const {
    const std::optional<int> v = integer(key);
    if (!v && !fallback) throw ConfigError(std::string(key), "missing required key");
    const int out = v ? *v : *fallback;
    if (out < 1) throw ConfigError(std::string(key), "must be at least 1");
    return out;
  }

  std::optional<std::string> string(std::string_view key) const {
    const auto node = table_.at_path(key);
    if (!node) return std::nullopt;
    if (!node.is_string()) throw ConfigError(std::string(key), "expected a string");
    return *node.value<std::string>();
  }

  std::vector<int> integer_list(std::string_view key) const {
    const auto node = table_.at_path(key);
    if (!node) throw ConfigError(std::string(key), "missing required key");
    const toml::array* arr = node.as_array();
    if (!arr) throw ConfigError(std::string(key), "expected an array of integers");
    std::vector<int> out;
    for (const auto& item : *arr) {
      if (!item.is_integer()) throw ConfigError(std::string(key), "expected an array of integers");
      out.push_back(static_cast<int>(*item.value<std::int64_t>()));
    }
    return out;
  }

  // [lower, upper]; either entry may be the string "inf" / "-inf".
  std::optional<ControlBounds> bounds(std::string_view key) const {
    const auto node = table_.at_path(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node.as_array();
    if (!arr || arr->size() != 2) throw ConfigError(std::string(key), "expected [lower, upper]");
    double v[2];
    for (std::size_t i = 0; i < 2; ++i) {
      const toml::node& item = *arr->get(i);
      if (item.is_number()) {
        v[i] = *item.value<double>();
      } else if (item.is_string() && *item.value<std::string>() == "-inf") {
        v[i] = -kInf;
      } else if (item.is_string() && *item.value<std::string>() == "inf") {
        v[i] = kInf;
      } else {
        throw ConfigError(std::string(key), "bounds must be numbers or \"inf\"/\"-inf\"");
      }
    }
    const ControlBounds b{v[0], v[1]};
    if (!(b.lower < b.upper)) throw ConfigError(std::string(key), "lower bound must be below upper bound");
    return b;
  }

 private:
  toml::table table_;
};

bool contains(const std::vector<std::string>& ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Context {
  Config config;
  fs::path output;
  std::ostream& out;
  std::ostream& err;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return os;
}

void write_summary(Context& ctx, const json& summary) {
  const std::string text = summary.dump(2);
  open_output(ctx.output / "summary.json") << text << '\n';
  ctx.out << text << '\n';
}

int solve_state_command(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const std::string id = ctx.config.string("problem.id").value_or("smooth-inhomogeneous");
  if (!contains(state_problem_ids(), id)) throw ConfigError("problem.id", fmt::format("unknown state problem '{}'", id));
  const int n = ctx.config.positive_integer("domain.n");
  const int M = ctx.config.positive_integer("time.M");
  const StateProblem problem = manufactured_state_problem(id);
  const double T = ctx.config.positive_real("time.T", problem.horizon);

  const Discretization d(unit_square_mesh(n), uniform_grid(M, T));
  const SpaceTimeField y = solve_state(d, problem.data);
  auto os = open_output(ctx.output / "state.csv");
  write_field_csv(os, y, d.grid());

  write_summary(ctx, {{"version", std::string(version())},
                      {"command", "solve-state"},
                      {"status", "ok"},
                      {"config", {{"problem", id}, {"n", n}, {"M", M}, {"T", T}}},
                      {"h", d.mesh().h()},
                      {"k", d.grid().k_max()},
                      {"error_state", state_error_exact(d, y, problem.exact)},
                      {"seconds", seconds_since(start)}});
  return kExitOk;
}

int solve_control_command(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const std::string id = ctx.config.string("problem.id").value_or("active-box");
  if (!contains(control_problem_ids(), id)) {
    throw ConfigError("problem.id", fmt::format("unknown control problem '{}'", id));
  }
  const int n = ctx.config.positive_integer("domain.n");
  const int M = ctx.config.positive_integer("time.M");
  ControlSetup setup = manufactured_control_problem(id);
  const double T = ctx.config.positive_real("time.T", setup.horizon);
  setup.problem.alpha = ctx.config.positive_real("control.alpha");
  if (auto b = ctx.config.bounds("control.bounds")) setup.problem.bounds = *b;
  SolveOptions options;
  if (auto tol = ctx.config.real("control.tol")) {
    if (!(*tol > 0.0)) throw ConfigError("control.tol", "must be positive");
    options.tol = *tol;
  }
  if (auto iters = ctx.config.integer("control.max_iters")) {
    if (*iters < 0) throw ConfigError("control.max_iters", "must be non-negative");
    options.max_iters = *iters;
  }

  json config = {{"problem", id},
                 {"n", n},
                 {"M", M},
                 {"T", T},
                 {"alpha", setup.problem.alpha},
                 {"bounds", {setup.problem.bounds.lower, setup.problem.bounds.upper}}};
  const Discretization d(unit_square_mesh(n), uniform_grid(M, T));
  const ReducedProblem rp(d, setup.problem);

  auto write_fields = [&](const OptimalityResult& r) {
    auto us = open_output(ctx.output / "control.csv");
    write_boundary_csv(us, r.u, d.grid(), d.mesh());
    auto ys = open_output(ctx.output / "state.csv");
    write_field_csv(ys, r.y, d.grid());
  };
  auto summary = [&](const OptimalityResult& r, const char* status) {
    json s = json::parse(result_json(r));
    s["command"] = "solve-control";
    s["status"] = status;
    s["config"] = config;
    s["seconds"] = seconds_since(start);
    return s;
  };

  try {
    const OptimalityResult r = solve_control(rp, options);
    write_fields(r);
    write_summary(ctx, summary(r, "ok"));
    return kExitOk;
  } catch (const ControlNotConverged& e) {
    write_fields(e.best());
    json s = summary(e.best(), "not-converged");
    s["best_residual"] = e.best().residual;
    write_summary(ctx, s);
    ctx.err << fmt::format("error: {}\n", e.what());
    return kExitSolver;
  }
}

int study_command(Context& ctx, const std::optional<std::string>& axis_flag) {
  StudySpec spec;
  spec.problem = ctx.config.string("problem.id").value_or("smooth-inhomogeneous");
  const bool control = contains(control_problem_ids(), spec.problem);
  if (!control && !contains(state_problem_ids(), spec.problem)) {
    throw ConfigError("problem.id", fmt::format("unknown problem '{}'", spec.problem));
  }
  const std::string axis = axis_flag ? *axis_flag : ctx.config.string("study.axis").value_or("time");
  try {
    spec.axis = axis_from_string(axis);
  } catch (const Error&) {
    throw ConfigError("study.axis", fmt::format("expected space, time or coupled, got '{}'", axis));
  }
  spec.levels = ctx.config.integer_list("study.levels");
  spec.reference = ctx.config.integer("study.reference").value_or(0);
  spec.fixed_n = ctx.config.positive_integer("domain.n", spec.fixed_n);
  spec.fixed_M = ctx.config.positive_integer("time.M", spec.fixed_M);
  spec.horizon = ctx.config.positive_real("time.T", spec.horizon);
  if (control) {
    if (ctx.config.has("control.alpha")) spec.alpha = ctx.config.positive_real("control.alpha");
    spec.bounds = ctx.config.bounds("control.bounds");
    if (auto tol = ctx.config.real("control.tol")) spec.solve.tol = *tol;
    if (auto iters = ctx.config.integer("control.max_iters")) spec.solve.max_iters = *iters;
  }
  try {
    validate(spec, control);
  } catch (const Error& e) {
    throw ConfigError(e.code() == ErrorCode::kNonNested ? "study.levels" : "study", e.what());
  }

  const StudyReport report = control ? run_control_convergence(spec) : run_state_convergence(spec);
  auto os = open_output(ctx.output / "study.csv");
  write_study_csv(os, report);
  json s = json::parse(study_json(report));
  s["command"] = "study";
  s["status"] = "ok";
  write_summary(ctx, s);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heat equation and Dirichlet boundary control solver", "pdbc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  std::optional<std::string> output_flag;
  std::optional<std::string> axis_flag;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "TOML configuration file")->required();
    sub->add_option("-o,--output", output_flag, "Output directory (overrides output.dir)");
  };
  CLI::App* state = app.add_subcommand("solve-state", "Solve a manufactured state problem");
  CLI::App* control = app.add_subcommand("solve-control", "Solve a box-constrained control problem");
  CLI::App* study = app.add_subcommand("study", "Run a refinement study");
  add_common(state);
  add_common(control);
  add_common(study);
  study->add_option("--axis", axis_flag, "Refinement axis (overrides study.axis)")
      ->check(CLI::IsMember({"space", "time", "coupled"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    toml::table table;
    try {
      table = toml::parse_file(config_path);
    } catch (const toml::parse_error& e) {
      throw ConfigError(config_path, std::string(e.description()));
    }
    Config config(std::move(table));
    const fs::path output = output_flag ? fs::path(*output_flag) : fs::path(config.string("output.dir").value_or("."));
    std::error_code ec;
    fs::create_directories(output, ec);
    if (ec) throw ConfigError("output.dir", ec.message());

    Context ctx{std::move(config), output, out, err};
    if (state->parsed()) return solve_state_command(ctx);
    if (control->parsed()) return solve_control_command(ctx);
    return study_command(ctx, axis_flag);
  } catch (const ConfigError& e) {
    err << fmt::format("error: {}\n", e.what());
    return kExitValidation;
  } catch (const Error& e) {
    err << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
    return e.is_solver_failure() ? kExitSolver : kExitValidation;
  } catch (const std::exception& e) {
    err << fmt::format("error: {}\n", e.what());
    return 1;
  }
}

}  // namespace pdbc::cli
