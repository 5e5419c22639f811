#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "pdbc/error.hpp"

namespace pdbc {

class SparseSym;

/// Partition 0 = t_0 < t_1 < ... < t_M = T of the time horizon.
///
/// Slabs are indexed from 0 in code: slab m is the interval (t_m, t_{m+1}]
/// with length step(m).
class TimeGrid {
 public:
  int num_slabs() const { return static_cast<int>(steps_.size()); }
  double horizon() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& steps() const { return steps_; }
  double start(int m) const { return nodes_[m]; }
  double end(int m) const { return nodes_[m + 1]; }
  double step(int m) const { return steps_[m]; }
  double k_max() const { return k_max_; }
  double k_min() const { return k_min_; }
  /// k_max / k_min; reported, never capped.
  double quasi_uniformity() const { return k_max_ / k_min_; }
  /// k_m <= k_{m-1} for every consecutive pair.
  bool non_increasing() const { return non_increasing_; }
  /// Index of the slab containing t (slabs are closed on the right).
  int slab_of(double t) const;

 private:
  friend TimeGrid uniform_grid(int, double);
  friend TimeGrid validate_grid(std::span<const double>, bool);
  explicit TimeGrid(std::vector<double> nodes);

  std::vector<double> nodes_;
  std::vector<double> steps_;
  double k_max_ = 0.0;
  double k_min_ = 0.0;
  bool non_increasing_ = true;
};

/// M equal steps of length T / M.
TimeGrid uniform_grid(int num_slabs, double horizon);

/// Builds a grid from explicit nodes. Throws Error(kNonMonotone) unless the
/// nodes start at 0 and increase strictly; with `strict` also throws
/// Error(kIncreasingStep) when some step is longer than its predecessor.
TimeGrid validate_grid(std::span<const double> nodes, bool strict = false);

std::string grid_to_json(const TimeGrid& grid);
TimeGrid grid_from_json(std::string_view json, bool strict = false);

/// One payload per slab.
template <class T>
struct SlabFunction {
  std::vector<T> values;

  int size() const { return static_cast<int>(values.size()); }
  T& operator[](int m) { return values[m]; }
  const T& operator[](int m) const { return values[m]; }
};

namespace detail {
inline constexpr double kGaussOffset = 0.28867513459481287;  // 1 / (2 sqrt 3)
}

/// Slab averages (1/k_m) \int_{I_m} w dt with two-point Gauss quadrature.
/// `w` maps a time to a scalar or an Eigen vector.
template <class F>
auto project_Pk(F&& w, const TimeGrid& grid) {
  using T = std::decay_t<decltype(w(0.0))>;
  SlabFunction<T> out;
  out.values.reserve(grid.num_slabs());
  for (int m = 0; m < grid.num_slabs(); ++m) {
    const double mid = 0.5 * (grid.start(m) + grid.end(m));
    const double offset = detail::kGaussOffset * grid.step(m);
    T value = w(mid - offset);
    value = 0.5 * (value + w(mid + offset));
    out.values.push_back(std::move(value));
  }
  return out;
}

/// Slab m takes w(t_{m+1}), the right end point.
template <class F>
auto interp_right(F&& w, const TimeGrid& grid) {
  using T = std::decay_t<decltype(w(0.0))>;
  SlabFunction<T> out;
  for (int m = 0; m < grid.num_slabs(); ++m) out.values.push_back(w(grid.end(m)));
  return out;
}

/// Slab m takes w(t_m), the left end point.
template <class F>
auto interp_left(F&& w, const TimeGrid& grid) {
  using T = std::decay_t<decltype(w(0.0))>;
  SlabFunction<T> out;
  for (int m = 0; m < grid.num_slabs(); ++m) out.values.push_back(w(grid.start(m)));
  return out;
}

/// Piecewise constant evaluation of a slab function at time t in (0, T].
template <class T>
const T& evaluate(const SlabFunction<T>& f, const TimeGrid& grid, double t) {
  return f[grid.slab_of(t)];
}

/// L2(I) distance between a scalar function and a slab function, using
/// `points_per_slab` midpoint samples per slab.
template <class F>
double l2_time_error(F&& w, const SlabFunction<double>& f, const TimeGrid& grid,
                     int points_per_slab = 64) {
  double sum = 0.0;
  for (int m = 0; m < grid.num_slabs(); ++m) {
    const double dt = grid.step(m) / points_per_slab;
    for (int q = 0; q < points_per_slab; ++q) {
      const double e = w(grid.start(m) + (q + 0.5) * dt) - f[m];
      sum += dt * e * e;
    }
  }
  return std::sqrt(sum);
}

/// Weighted jump energy sum_m k_m^{-(2s-1)} ||v_m - v_{m-1}||_M^2, where
/// v_{-1} := initial and ||x||_M^2 = x^T M x.
double jump_energy(std::span<const Eigen::VectorXd> slabs, const Eigen::VectorXd& initial,
                   double s, const SparseSym& mass, const TimeGrid& grid);

}  // namespace pdbc
