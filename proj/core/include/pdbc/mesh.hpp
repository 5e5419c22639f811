#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pdbc {

using Point = Eigen::Vector2d;

/// Conforming P1 triangulation of a convex polygon.
///
/// Triangles are stored counterclockwise. Boundary edges and boundary nodes
/// are ordered along the boundary, counterclockwise, starting from the node
/// that is lexicographically smallest in (y, x) (the origin for the unit
/// square). Interior node indices are ascending.
///
/// A mesh produced by refine() remembers, for every node, the pair of parent
/// nodes it was created from (a == b for nodes inherited from the parent).
class Mesh {
 public:
  /// Validates the triangulation and classifies nodes and edges.
  /// Throws Error(kDegenerateMesh) for non-positive triangle areas or
  /// non-manifold edges.
  Mesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return num_edges_; }
  int num_boundary_nodes() const { return static_cast<int>(boundary_nodes_.size()); }
  int num_interior_nodes() const { return static_cast<int>(interior_nodes_.size()); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(int i) const { return nodes_[i]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_edges_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }

  /// Position of node i in boundary_nodes(), or -1 for interior nodes.
  int boundary_position(int i) const { return boundary_position_[i]; }
  /// Position of node i in interior_nodes(), or -1 for boundary nodes.
  int interior_position(int i) const { return interior_position_[i]; }
  bool is_boundary(int i) const { return boundary_position_[i] >= 0; }

  /// Maximum triangle diameter.
  double h() const { return h_; }

  double triangle_area(int t) const;
  double area() const;
  double boundary_length() const;

  /// Parent node pairs if this mesh came from refine(), empty otherwise.
  const std::vector<std::array<int, 2>>& parents() const { return parents_; }
  int parent_node_count() const { return parent_node_count_; }

 private:
  friend Mesh refine(const Mesh& mesh);

  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> boundary_edges_;
  std::vector<int> boundary_nodes_;
  std::vector<int> interior_nodes_;
  std::vector<int> boundary_position_;
  std::vector<int> interior_position_;
  std::vector<std::array<int, 2>> parents_;
  int parent_node_count_ = 0;
  int num_edges_ = 0;
  double h_ = 0.0;
};

/// Structured mesh of the unit square with n subdivisions per side; every
/// cell is split along its (i,j)-(i+1,j+1) diagonal. Nodes are numbered
/// lexicographically by (y, x).
Mesh unit_square_mesh(int n);

/// Uniform quadrisection through edge midpoints. Parent nodes keep their
/// indices and coordinates; midpoint nodes are appended.
Mesh refine(const Mesh& mesh);

/// P1 prolongation of a nodal field from `parent` to `child = refine(parent)`.
/// Throws Error(kNonNested) when `child` was not produced from `parent`.
Eigen::VectorXd prolong(const Eigen::VectorXd& field, const Mesh& parent, const Mesh& child);

/// Prolongation of a boundary field (values on parent.boundary_nodes()).
Eigen::VectorXd prolong_boundary(const Eigen::VectorXd& field, const Mesh& parent,
                                 const Mesh& child);

/// Writes `nodes <N> triangles <T>`, then one "x y" line per node, then one
/// "a b c" line per triangle.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace pdbc
