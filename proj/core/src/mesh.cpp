#include "pdbc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "pdbc/error.hpp"

namespace pdbc {
namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

bool lex_less_yx(const Point& p, const Point& q) {
  return p.y() < q.y() || (p.y() == q.y() && p.x() < q.x());
}

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)) {
  const int n_nodes = num_nodes();
  if (n_nodes < 3 || triangles_.empty()) {
    throw Error(ErrorCode::kDegenerateMesh, "mesh needs at least one triangle");
  }

  // Directed edge as it appears in a counterclockwise triangle, and how many
  // triangles share the undirected edge.
  std::map<EdgeKey, std::pair<int, EdgeKey>> edges;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= n_nodes) {
        throw Error(ErrorCode::kDegenerateMesh, fmt::format("triangle {} references node {}", t, v));
      }
    }
    const double area = signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
    if (!(area > 0.0)) {
      throw Error(ErrorCode::kDegenerateMesh,
                  fmt::format("triangle {} has non-positive signed area {}", t, area));
    }
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      auto [it, inserted] = edges.try_emplace(edge_key(a, b), 0, EdgeKey{a, b});
      ++it->second.first;
      h_ = std::max(h_, (nodes_[a] - nodes_[b]).norm());
    }
  }
  num_edges_ = static_cast<int>(edges.size());

  std::vector<int> next(n_nodes, -1);
  int n_boundary_edges = 0;
  for (const auto& [key, entry] : edges) {
    const auto [count, directed] = entry;
    if (count > 2) {
      throw Error(ErrorCode::kDegenerateMesh,
                  fmt::format("edge ({},{}) shared by {} triangles", key.first, key.second, count));
    }
    if (count == 1) {
      if (next[directed.first] != -1) {
        throw Error(ErrorCode::kDegenerateMesh, "boundary is not a simple closed curve");
      }
      next[directed.first] = directed.second;
      ++n_boundary_edges;
    }
  }

  int start = -1;
  for (int i = 0; i < n_nodes; ++i) {
    if (next[i] != -1 && (start == -1 || lex_less_yx(nodes_[i], nodes_[start]))) start = i;
  }
  int current = start;
  do {
    boundary_nodes_.push_back(current);
    boundary_edges_.push_back({current, next[current]});
    current = next[current];
    if (current == -1 || static_cast<int>(boundary_nodes_.size()) > n_boundary_edges) {
      throw Error(ErrorCode::kDegenerateMesh, "boundary is not a simple closed curve");
    }
  } while (current != start);
  if (static_cast<int>(boundary_nodes_.size()) != n_boundary_edges) {
    throw Error(ErrorCode::kDegenerateMesh, "boundary consists of more than one cycle");
  }

  boundary_position_.assign(n_nodes, -1);
  interior_position_.assign(n_nodes, -1);
  for (int p = 0; p < num_boundary_nodes(); ++p) boundary_position_[boundary_nodes_[p]] = p;
  for (int i = 0; i < n_nodes; ++i) {
    if (boundary_position_[i] < 0) {
      interior_position_[i] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(i);
    }
  }
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles_[t];
  return signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double Mesh::area() const {
  double total = 0.0;
  for (int t = 0; t < num_triangles(); ++t) total += triangle_area(t);
  return total;
}

double Mesh::boundary_length() const {
  double total = 0.0;
  for (const auto& [a, b] : boundary_edges_) total += (nodes_[a] - nodes_[b]).norm();
  return total;
}

Mesh unit_square_mesh(int n) {
  if (n < 1) {
    throw Error(ErrorCode::kDegenerateMesh, "unit_square_mesh: n must be at least 1");
  }
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      nodes.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(nodes), std::move(triangles));
}

Mesh refine(const Mesh& mesh) {
  std::vector<Point> nodes = mesh.nodes();
  std::vector<std::array<int, 2>> parents;
  parents.reserve(nodes.size());
  for (int i = 0; i < mesh.num_nodes(); ++i) parents.push_back({i, i});

  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), 0);
    if (inserted) {
      it->second = static_cast<int>(nodes.size());
      nodes.push_back(0.5 * (mesh.node(a) + mesh.node(b)));
      parents.push_back({std::min(a, b), std::max(a, b)});
    }
    return it->second;
  };

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * static_cast<std::size_t>(mesh.num_triangles()));
  for (const auto& [a, b, c] : mesh.triangles()) {
    const int ab = mid(a, b);
    const int bc = mid(b, c);
    const int ca = mid(c, a);
    triangles.push_back({a, ab, ca});
    triangles.push_back({ab, b, bc});
    triangles.push_back({ca, bc, c});
    triangles.push_back({ab, bc, ca});
  }

  Mesh child(std::move(nodes), std::move(triangles));
  child.parents_ = std::move(parents);
  child.parent_node_count_ = mesh.num_nodes();
  return child;
}

namespace {

void check_nested(const Mesh& parent, const Mesh& child) {
  const auto& parents = child.parents();
  bool ok = child.parent_node_count() == parent.num_nodes() &&
            static_cast<int>(parents.size()) == child.num_nodes();
  for (int i = 0; ok && i < child.num_nodes(); ++i) {
    const auto [a, b] = parents[i];
    if (a < 0 || b < 0 || a >= parent.num_nodes() || b >= parent.num_nodes()) {
      ok = false;
      break;
    }
    const Point expected = 0.5 * (parent.node(a) + parent.node(b));
    ok = (child.node(i) - expected).norm() <= 1e-14;
  }
  if (!ok) {
    throw Error(ErrorCode::kNonNested, "prolong: child mesh is not a refinement of parent");
  }
}

}  // namespace

Eigen::VectorXd prolong(const Eigen::VectorXd& field, const Mesh& parent, const Mesh& child) {
  if (field.size() != parent.num_nodes()) {
    throw Error(ErrorCode::kDimensionMismatch, "prolong: field size does not match parent mesh");
  }
  check_nested(parent, child);
  Eigen::VectorXd out(child.num_nodes());
  for (int i = 0; i < child.num_nodes(); ++i) {
    const auto [a, b] = child.parents()[i];
    out[i] = a == b ? field[a] : 0.5 * (field[a] + field[b]);
  }
  return out;
}

Eigen::VectorXd prolong_boundary(const Eigen::VectorXd& field, const Mesh& parent,
                                 const Mesh& child) {
  if (field.size() != parent.num_boundary_nodes()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "prolong_boundary: field size does not match parent boundary");
  }
  check_nested(parent, child);
  Eigen::VectorXd out(child.num_boundary_nodes());
  for (int p = 0; p < child.num_boundary_nodes(); ++p) {
    const auto [a, b] = child.parents()[child.boundary_nodes()[p]];
    const int pa = parent.boundary_position(a);
    const int pb = parent.boundary_position(b);
    if (pa < 0 || pb < 0) {
      throw Error(ErrorCode::kNonNested, "prolong_boundary: boundary node without boundary parents");
    }
    out[p] = 0.5 * (field[pa] + field[pb]);
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << fmt::format("nodes {} triangles {}\n", mesh.num_nodes(), mesh.num_triangles());
  for (const auto& p : mesh.nodes()) os << fmt::format("{:.17g} {:.17g}\n", p.x(), p.y());
  for (const auto& [a, b, c] : mesh.triangles()) os << fmt::format("{} {} {}\n", a, b, c);
}

}  // namespace pdbc
