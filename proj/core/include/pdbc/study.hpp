#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdbc/control.hpp"
#include "pdbc/mesh.hpp"
#include "pdbc/parabolic.hpp"

namespace pdbc {

/// space: n varies, M fixed. time: M varies, n fixed. coupled: n = M = level.
enum class Axis { kSpace, kTime, kCoupled };

std::string_view to_string(Axis axis);
/// Throws Error(kInvalidArgument) for anything but "space", "time", "coupled".
Axis axis_from_string(std::string_view name);

struct StudySpec {
  std::string problem = "smooth-inhomogeneous";
  Axis axis = Axis::kTime;
  std::vector<int> levels;
  int reference = 0;  ///< 0 compares against the exact solution (state studies only)
  int fixed_n = 32;
  int fixed_M = 512;
  double horizon = 1.0;
  std::optional<double> alpha;           ///< overrides the control problem's alpha
  std::optional<ControlBounds> bounds;   ///< overrides the control problem's bounds
  SolveOptions solve;
};

/// Throws Error(kInvalidArgument) for empty or non-increasing levels and a
/// reference that is not finer than every level, Error(kNonNested) when a
/// level is not a power-of-two multiple of the coarsest one.
void validate(const StudySpec& spec, bool control);

struct StudyLevel {
  int level = 0;
  int n = 0;
  int M = 0;
  double h = 0.0;
  double k = 0.0;
  double error_state = 0.0;
  double error_control = 0.0;  ///< control studies only
  double cost = 0.0;           ///< control studies only
  int iterations = 0;          ///< control studies only
  std::optional<double> eoc_state;
  std::optional<double> eoc_control;
  bool unreliable = false;     ///< within a factor 4 of the reference
  double seconds = 0.0;
};

struct StudyReport {
  StudySpec spec;
  bool control = false;
  std::vector<StudyLevel> levels;
  std::optional<double> fitted_order_state;
  std::optional<double> fitted_order_control;
  double seconds = 0.0;
};

/// log(e_j / e_{j+1}) / log(s_j / s_{j+1}) for consecutive pairs.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> sizes);
/// Least-squares slope of log e against log s.
double fitted_order(std::span<const double> errors, std::span<const double> sizes);

/// Nested meshes obtained by uniform refinement of unit_square_mesh(coarsest).
class MeshHierarchy {
 public:
  MeshHierarchy(int coarsest, int finest);
  const Mesh& mesh(int n) const;
  Eigen::VectorXd prolong(const Eigen::VectorXd& field, int from_n, int to_n) const;
  Eigen::VectorXd prolong_boundary(const Eigen::VectorXd& field, int from_n, int to_n) const;

 private:
  int index(int n) const;
  int coarsest_;
  std::vector<Mesh> meshes_;
};

/// Slab replication onto a grid whose nodes contain the coarse nodes.
/// Throws Error(kNonNested) otherwise.
SpaceTimeField prolong_time(const SpaceTimeField& field, const TimeGrid& coarse, const TimeGrid& fine);
BoundaryField prolong_time(const BoundaryField& field, const TimeGrid& coarse, const TimeGrid& fine);

/// ||y - y_kh||_{L2(I; L2(Omega))} with five-point Gauss in time and a
/// degree-5 rule on each triangle.
double state_error_exact(const Discretization& d, const SpaceTimeField& y,
                         const SpaceTimeFunction& exact);

StudyReport run_state_convergence(const StudySpec& spec);
StudyReport run_control_convergence(const StudySpec& spec);

/// State: level,n,M,h,k,error_state,eoc. Control:
/// level,n,M,h,k,error_control,error_state,cost,iterations,eoc_control,eoc_state.
void write_study_csv(std::ostream& os, const StudyReport& report);
std::string study_json(const StudyReport& report);

}  // namespace pdbc
