#include "pdbc/timegrid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "pdbc/sparse.hpp"

namespace pdbc {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  steps_.reserve(nodes_.size() - 1);
  for (std::size_t i = 1; i < nodes_.size(); ++i) steps_.push_back(nodes_[i] - nodes_[i - 1]);
  k_max_ = *std::max_element(steps_.begin(), steps_.end());
  k_min_ = *std::min_element(steps_.begin(), steps_.end());
  // Relative slack so that uniform grids with rounded nodes count as compliant.
  for (std::size_t m = 1; m < steps_.size(); ++m) {
    if (steps_[m] > steps_[m - 1] * (1.0 + 1e-12)) non_increasing_ = false;
  }
}

int TimeGrid::slab_of(double t) const {
  auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), t);
  if (it == nodes_.end()) return num_slabs() - 1;
  return static_cast<int>(it - nodes_.begin()) - 1;
}

TimeGrid uniform_grid(int num_slabs, double horizon) {
  if (num_slabs < 1 || !(horizon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("uniform_grid: need M >= 1 and T > 0 (got M={}, T={})", num_slabs, horizon));
  }
  std::vector<double> nodes(num_slabs + 1);
  for (int m = 0; m <= num_slabs; ++m) nodes[m] = horizon * m / num_slabs;
  nodes.back() = horizon;
  return TimeGrid(std::move(nodes));
}

TimeGrid validate_grid(std::span<const double> nodes, bool strict) {
  if (nodes.size() < 2 || nodes.front() != 0.0) {
    throw Error(ErrorCode::kNonMonotone, "time grid must start at 0 and contain at least one slab");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw Error(ErrorCode::kNonMonotone,
                  fmt::format("time grid not strictly increasing at index {}", i));
    }
  }
  TimeGrid grid(std::vector<double>(nodes.begin(), nodes.end()));
  if (strict && !grid.non_increasing()) {
    for (int m = 1; m < grid.num_slabs(); ++m) {
      if (grid.step(m) > grid.step(m - 1) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::kIncreasingStep,
                    fmt::format("step {} ({}) exceeds step {} ({})", m + 1, grid.step(m), m,
                                grid.step(m - 1)));
      }
    }
  }
  return grid;
}

std::string grid_to_json(const TimeGrid& grid) { return nlohmann::json(grid.nodes()).dump(); }

TimeGrid grid_from_json(std::string_view json, bool strict) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("time grid JSON: {}", e.what()));
  }
  if (!parsed.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "time grid JSON must be an array of nodes");
  }
  std::vector<double> nodes;
  for (const auto& v : parsed) {
    if (!v.is_number()) throw Error(ErrorCode::kInvalidArgument, "time grid JSON: non-numeric node");
    nodes.push_back(v.get<double>());
  }
  return validate_grid(nodes, strict);
}

double jump_energy(std::span<const Eigen::VectorXd> slabs, const Eigen::VectorXd& initial,
                   double s, const SparseSym& mass, const TimeGrid& grid) {
  if (static_cast<int>(slabs.size()) != grid.num_slabs()) {
    throw Error(ErrorCode::kDimensionMismatch, "jump_energy: slab count differs from grid");
  }
  if (s < 0.5 || s > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "jump_energy: exponent s must lie in [1/2, 1]");
  }
  double total = 0.0;
  for (int m = 0; m < grid.num_slabs(); ++m) {
    const Eigen::VectorXd jump = slabs[m] - (m == 0 ? initial : slabs[m - 1]);
    total += std::pow(grid.step(m), -(2.0 * s - 1.0)) * jump.dot(mass * jump);
  }
  return total;
}

}  // namespace pdbc
