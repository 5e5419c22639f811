#include "pdbc/study.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "pdbc/manufactured.hpp"
#include "pdbc/version.hpp"
#include "quadrature.hpp"

namespace pdbc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool power_of_two_multiple(int value, int base) {
  if (base <= 0 || value < base || value % base != 0) return false;
  const int ratio = value / base;
  return (ratio & (ratio - 1)) == 0;
}

struct LevelSize {
  int n;
  int M;
};

LevelSize level_size(const StudySpec& spec, int level) {
  switch (spec.axis) {
    case Axis::kSpace: return {level, spec.fixed_M};
    case Axis::kTime: return {spec.fixed_n, level};
    case Axis::kCoupled: return {level, level};
  }
  return {0, 0};
}

double level_scale(const StudySpec& spec, const StudyLevel& l) {
  return spec.axis == Axis::kTime ? l.k : l.h;
}

template <class Field>
Field replicate_slabs(const Field& field, const TimeGrid& coarse, const TimeGrid& fine) {
  if (field.num_slabs() != coarse.num_slabs()) {
    throw Error(ErrorCode::kDimensionMismatch, "prolong_time: field does not match coarse grid");
  }
  const double tol = 1e-12 * coarse.horizon();
  bool nested = std::abs(coarse.horizon() - fine.horizon()) <= tol;
  for (int m = 0; nested && m <= coarse.num_slabs(); ++m) {
    const double t = coarse.nodes()[m];
    const int j = t <= 0.0 ? 0 : fine.slab_of(t) + 1;
    nested = std::abs(fine.nodes()[j] - t) <= tol;
  }
  if (!nested) throw Error(ErrorCode::kNonNested, "prolong_time: fine grid does not refine coarse grid");
  Field out = field;
  out.slabs.clear();
  out.slabs.reserve(fine.num_slabs());
  for (int j = 0; j < fine.num_slabs(); ++j) {
    out.slabs.push_back(field.slabs[coarse.slab_of(0.5 * (fine.start(j) + fine.end(j)))]);
  }
  return out;
}

// Level bookkeeping shared by both studies: meshes, errors, EOCs, flags.
struct StudyPlan {
  std::vector<LevelSize> sizes;
  LevelSize reference{0, 0};
  MeshHierarchy meshes;
};

StudyPlan make_plan(const StudySpec& spec) {
  std::vector<LevelSize> sizes;
  for (int level : spec.levels) sizes.push_back(level_size(spec, level));
  const LevelSize reference = spec.reference > 0 ? level_size(spec, spec.reference) : LevelSize{0, 0};
  int coarsest = sizes.front().n;
  int finest = std::max(sizes.back().n, reference.n);
  return {sizes, reference, MeshHierarchy(coarsest, finest)};
}

void finalize(StudyReport& report) {
  const StudySpec& spec = report.spec;
  std::vector<double> scale;
  std::vector<double> e_state;
  std::vector<double> e_control;
  std::vector<double> reliable_scale;
  std::vector<double> reliable_state;
  std::vector<double> reliable_control;
  for (auto& l : report.levels) {
    l.unreliable = spec.reference > 0 && 4 * l.level > spec.reference;
    scale.push_back(level_scale(spec, l));
    e_state.push_back(l.error_state);
    e_control.push_back(l.error_control);
    if (!l.unreliable) {
      reliable_scale.push_back(scale.back());
      reliable_state.push_back(l.error_state);
      reliable_control.push_back(l.error_control);
    }
  }
  const auto rates_state = eoc(e_state, scale);
  const auto rates_control = eoc(e_control, scale);
  for (std::size_t j = 0; j < rates_state.size(); ++j) {
    report.levels[j + 1].eoc_state = rates_state[j];
    if (report.control) report.levels[j + 1].eoc_control = rates_control[j];
  }
  // Levels close to the reference underestimate the error; fit on the rest
  // when at least two remain.
  const bool use_reliable = reliable_scale.size() >= 2;
  const auto& fit_scale = use_reliable ? reliable_scale : scale;
  if (fit_scale.size() >= 2) {
    report.fitted_order_state = fitted_order(use_reliable ? reliable_state : e_state, fit_scale);
    if (report.control) {
      report.fitted_order_control = fitted_order(use_reliable ? reliable_control : e_control, fit_scale);
    }
  }
}

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kSpace: return "space";
    case Axis::kTime: return "time";
    case Axis::kCoupled: return "coupled";
  }
  return "unknown";
}

Axis axis_from_string(std::string_view name) {
  if (name == "space") return Axis::kSpace;
  if (name == "time") return Axis::kTime;
  if (name == "coupled") return Axis::kCoupled;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("study.axis must be space, time or coupled, got '{}'", name));
}

void validate(const StudySpec& spec, bool control) {
  if (spec.levels.empty()) throw Error(ErrorCode::kInvalidArgument, "study.levels is empty");
  for (std::size_t j = 0; j < spec.levels.size(); ++j) {
    if (spec.levels[j] < 1 || (j > 0 && spec.levels[j] <= spec.levels[j - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "study.levels must be positive and strictly increasing");
    }
    if (!power_of_two_multiple(spec.levels[j], spec.levels.front())) {
      throw Error(ErrorCode::kNonNested,
                  fmt::format("study.levels: {} is not a power-of-two multiple of {}", spec.levels[j],
                              spec.levels.front()));
    }
  }
  if (spec.reference == 0) {
    if (control) {
      throw Error(ErrorCode::kInvalidArgument, "study.reference: control studies need a reference level");
    }
  } else if (spec.reference <= spec.levels.back()) {
    throw Error(ErrorCode::kInvalidArgument, "study.reference must be finer than every level");
  } else if (!power_of_two_multiple(spec.reference, spec.levels.front())) {
    throw Error(ErrorCode::kNonNested, "study.reference is not nested with the levels");
  }
  if (spec.fixed_n < 1 || spec.fixed_M < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fixed n and M must be positive");
  }
  if (!(spec.horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "time.T must be positive");
}

std::vector<double> eoc(std::span<const double> errors, std::span<const double> sizes) {
  if (errors.size() != sizes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "eoc: errors and sizes differ in length");
  }
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
    out.push_back(std::log(errors[j] / errors[j + 1]) / std::log(sizes[j] / sizes[j + 1]));
  }
  return out;
}

double fitted_order(std::span<const double> errors, std::span<const double> sizes) {
  if (errors.size() != sizes.size() || errors.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fitted_order needs at least two matching samples");
  }
  const double n = static_cast<double>(errors.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < errors.size(); ++j) {
    const double x = std::log(sizes[j]);
    const double y = std::log(errors[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MeshHierarchy::MeshHierarchy(int coarsest, int finest) : coarsest_(coarsest) {
  if (!power_of_two_multiple(finest, coarsest)) {
    throw Error(ErrorCode::kNonNested,
                fmt::format("mesh hierarchy: {} is not a power-of-two multiple of {}", finest, coarsest));
  }
  meshes_.push_back(unit_square_mesh(coarsest));
  for (int n = coarsest; n < finest; n *= 2) meshes_.push_back(refine(meshes_.back()));
}

int MeshHierarchy::index(int n) const {
  int j = 0;
  for (int m = coarsest_; m < n; m *= 2) ++j;
  if (!power_of_two_multiple(n, coarsest_) || j >= static_cast<int>(meshes_.size())) {
    throw Error(ErrorCode::kNonNested, fmt::format("mesh hierarchy has no level n = {}", n));
  }
  return j;
}

const Mesh& MeshHierarchy::mesh(int n) const { return meshes_[index(n)]; }

Eigen::VectorXd MeshHierarchy::prolong(const Eigen::VectorXd& field, int from_n, int to_n) const {
  Eigen::VectorXd out = field;
  for (int j = index(from_n); j < index(to_n); ++j) out = pdbc::prolong(out, meshes_[j], meshes_[j + 1]);
  return out;
}

Eigen::VectorXd MeshHierarchy::prolong_boundary(const Eigen::VectorXd& field, int from_n,
                                                int to_n) const {
  Eigen::VectorXd out = field;
  for (int j = index(from_n); j < index(to_n); ++j) {
    out = pdbc::prolong_boundary(out, meshes_[j], meshes_[j + 1]);
  }
  return out;
}

SpaceTimeField prolong_time(const SpaceTimeField& field, const TimeGrid& coarse, const TimeGrid& fine) {
  return replicate_slabs(field, coarse, fine);
}

BoundaryField prolong_time(const BoundaryField& field, const TimeGrid& coarse, const TimeGrid& fine) {
  return replicate_slabs(field, coarse, fine);
}

double state_error_exact(const Discretization& d, const SpaceTimeField& y,
                         const SpaceTimeFunction& exact) {
  const Mesh& mesh = d.mesh();
  const TimeGrid& grid = d.grid();
  double sum = 0.0;
  for (int m = 0; m < grid.num_slabs(); ++m) {
    const Eigen::VectorXd& v = y.slabs[m];
    for (const auto& qt : quadrature::kGauss5) {
      const double t = grid.start(m) + qt.x * grid.step(m);
      for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& [a, b, c] = mesh.triangles()[tri];
        const double area = mesh.triangle_area(tri);
        for (const auto& q : quadrature::kTriangleDegree5) {
          const auto& w = q.bary;
          const Point x = w[0] * mesh.node(a) + w[1] * mesh.node(b) + w[2] * mesh.node(c);
          const double e = exact(t, x) - (w[0] * v[a] + w[1] * v[b] + w[2] * v[c]);
          sum += grid.step(m) * qt.weight * area * q.weight * e * e;
        }
      }
    }
  }
  return std::sqrt(sum);
}

StudyReport run_state_convergence(const StudySpec& spec) {
  validate(spec, false);
  const auto start = Clock::now();
  const StateProblem problem = manufactured_state_problem(spec.problem);
  const StudyPlan plan = make_plan(spec);

  StudyReport report;
  report.spec = spec;

  std::optional<Discretization> ref;
  SpaceTimeField y_ref;
  if (spec.reference > 0) {
    ref.emplace(plan.meshes.mesh(plan.reference.n), uniform_grid(plan.reference.M, spec.horizon));
    y_ref = solve_state(*ref, problem.data);
  }

  for (std::size_t j = 0; j < spec.levels.size(); ++j) {
    const auto level_start = Clock::now();
    const LevelSize size = plan.sizes[j];
    const Discretization d(plan.meshes.mesh(size.n), uniform_grid(size.M, spec.horizon));
    const SpaceTimeField y = solve_state(d, problem.data);
    StudyLevel l;
    l.level = spec.levels[j];
    l.n = size.n;
    l.M = size.M;
    l.h = d.mesh().h();
    l.k = d.grid().k_max();
    if (ref) {
      SpaceTimeField fine = y;
      for (auto& s : fine.slabs) s = plan.meshes.prolong(s, size.n, plan.reference.n);
      fine = prolong_time(fine, d.grid(), ref->grid());
      l.error_state = l2_norm(ref->ops(), ref->grid(), fine - y_ref);
    } else {
      l.error_state = state_error_exact(d, y, problem.exact);
    }
    l.seconds = seconds_since(level_start);
    report.levels.push_back(l);
  }
  finalize(report);
  report.seconds = seconds_since(start);
  return report;
}

StudyReport run_control_convergence(const StudySpec& spec) {
  validate(spec, true);
  const auto start = Clock::now();
  ControlSetup setup = manufactured_control_problem(spec.problem);
  if (spec.alpha) setup.problem.alpha = *spec.alpha;
  if (spec.bounds) setup.problem.bounds = *spec.bounds;
  const StudyPlan plan = make_plan(spec);

  StudyReport report;
  report.spec = spec;
  report.control = true;

  const Discretization ref(plan.meshes.mesh(plan.reference.n),
                           uniform_grid(plan.reference.M, spec.horizon));
  const OptimalityResult opt_ref = solve_control(ReducedProblem(ref, setup.problem), spec.solve);

  for (std::size_t j = 0; j < spec.levels.size(); ++j) {
    const auto level_start = Clock::now();
    const LevelSize size = plan.sizes[j];
    const Discretization d(plan.meshes.mesh(size.n), uniform_grid(size.M, spec.horizon));
    const OptimalityResult opt = solve_control(ReducedProblem(d, setup.problem), spec.solve);

    SpaceTimeField y = opt.y;
    for (auto& s : y.slabs) s = plan.meshes.prolong(s, size.n, plan.reference.n);
    y = prolong_time(y, d.grid(), ref.grid());
    BoundaryField u = opt.u;
    for (auto& s : u.slabs) s = plan.meshes.prolong_boundary(s, size.n, plan.reference.n);
    u = prolong_time(u, d.grid(), ref.grid());

    StudyLevel l;
    l.level = spec.levels[j];
    l.n = size.n;
    l.M = size.M;
    l.h = d.mesh().h();
    l.k = d.grid().k_max();
    l.error_state = l2_norm(ref.ops(), ref.grid(), y - opt_ref.y);
    l.error_control = l2_norm(ref.ops(), ref.grid(), u - opt_ref.u);
    l.cost = opt.cost;
    l.iterations = opt.iterations;
    l.seconds = seconds_since(level_start);
    report.levels.push_back(l);
  }
  finalize(report);
  report.seconds = seconds_since(start);
  return report;
}

void write_study_csv(std::ostream& os, const StudyReport& report) {
  if (report.control) {
    os << "level,n,M,h,k,error_control,error_state,cost,iterations,eoc_control,eoc_state\n";
  } else {
    os << "level,n,M,h,k,error_state,eoc\n";
  }
  for (const auto& l : report.levels) {
    if (report.control) {
      os << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", l.level, l.n, l.M, csv_number(l.h),
                        csv_number(l.k), csv_number(l.error_control), csv_number(l.error_state),
                        csv_number(l.cost), l.iterations, csv_optional(l.eoc_control),
                        csv_optional(l.eoc_state));
    } else {
      os << fmt::format("{},{},{},{},{},{},{}\n", l.level, l.n, l.M, csv_number(l.h), csv_number(l.k),
                        csv_number(l.error_state), csv_optional(l.eoc_state));
    }
  }
}

std::string study_json(const StudyReport& report) {
  using nlohmann::json;
  const StudySpec& spec = report.spec;
  json config = {{"problem", spec.problem},
                 {"axis", std::string(to_string(spec.axis))},
                 {"levels", spec.levels},
                 {"reference", spec.reference},
                 {"fixed_n", spec.fixed_n},
                 {"fixed_M", spec.fixed_M},
                 {"T", spec.horizon}};
  if (spec.alpha) config["alpha"] = *spec.alpha;
  if (spec.bounds) config["bounds"] = {spec.bounds->lower, spec.bounds->upper};
  json levels = json::array();
  for (const auto& l : report.levels) {
    json row = {{"level", l.level},       {"n", l.n},
                {"M", l.M},               {"h", l.h},
                {"k", l.k},               {"error_state", l.error_state},
                {"eoc_state", optional_json(l.eoc_state)},
                {"unreliable", l.unreliable},
                {"seconds", l.seconds}};
    if (report.control) {
      row["error_control"] = l.error_control;
      row["eoc_control"] = optional_json(l.eoc_control);
      row["cost"] = l.cost;
      row["iterations"] = l.iterations;
    }
    levels.push_back(std::move(row));
  }
  json out = {{"version", std::string(version())},
              {"kind", report.control ? "control" : "state"},
              {"config", config},
              {"levels", levels},
              {"fitted_order_state", optional_json(report.fitted_order_state)},
              {"seconds", report.seconds}};
  if (report.control) out["fitted_order_control"] = optional_json(report.fitted_order_control);
  return out.dump(2);
}

}  // namespace pdbc
