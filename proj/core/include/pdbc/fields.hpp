#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pdbc/mesh.hpp"

namespace pdbc {

using SpaceFunction = std::function<double(const Point&)>;
using SpaceTimeFunction = std::function<double(double, const Point&)>;

/// Piecewise constant in time, P1 in space: one nodal vector per slab plus
/// the nodal initial value used to form the first jump.
struct SpaceTimeField {
  std::vector<Eigen::VectorXd> slabs;
  Eigen::VectorXd initial;

  static SpaceTimeField zeros(int num_slabs, int num_nodes) {
    return {std::vector<Eigen::VectorXd>(num_slabs, Eigen::VectorXd::Zero(num_nodes)),
            Eigen::VectorXd::Zero(num_nodes)};
  }
  int num_slabs() const { return static_cast<int>(slabs.size()); }

  SpaceTimeField& operator+=(const SpaceTimeField& o);
  SpaceTimeField& operator-=(const SpaceTimeField& o);
  SpaceTimeField& operator*=(double a);
};

/// Piecewise constant in time, P1 on the boundary: one vector per slab,
/// indexed by position in Mesh::boundary_nodes().
struct BoundaryField {
  std::vector<Eigen::VectorXd> slabs;

  static BoundaryField zeros(int num_slabs, int num_boundary) {
    return {std::vector<Eigen::VectorXd>(num_slabs, Eigen::VectorXd::Zero(num_boundary))};
  }
  int num_slabs() const { return static_cast<int>(slabs.size()); }

  BoundaryField& operator+=(const BoundaryField& o);
  BoundaryField& operator-=(const BoundaryField& o);
  BoundaryField& operator*=(double a);
  /// this += a * x
  BoundaryField& axpy(double a, const BoundaryField& x);
  double max_abs() const;
};

inline SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
inline SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
inline SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }
inline BoundaryField operator+(BoundaryField a, const BoundaryField& b) { return a += b; }
inline BoundaryField operator-(BoundaryField a, const BoundaryField& b) { return a -= b; }
inline BoundaryField operator*(double s, BoundaryField a) { return a *= s; }

}  // namespace pdbc
