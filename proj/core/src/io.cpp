#include "pdbc/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "pdbc/error.hpp"
#include "pdbc/version.hpp"

namespace pdbc {
namespace {

struct Row {
  int slab;
  int node;
  double value;
};

std::vector<Row> read_rows(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("slab,t_m,node,value", 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "field csv: missing header slab,t_m,node,value");
  }
  std::vector<Row> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t begin = 0;
    for (std::size_t comma; (comma = line.find(',', begin)) != std::string::npos; begin = comma + 1) {
      cells.push_back(line.substr(begin, comma - begin));
    }
    cells.push_back(line.substr(begin));
    Row row{};
    bool ok = cells.size() == 4;
    if (ok) {
      const auto parse_int = [](const std::string& s, int& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
      };
      ok = parse_int(cells[0], row.slab) && parse_int(cells[2], row.node);
      try {
        std::size_t used = 0;
        row.value = std::stod(cells[3], &used);
        ok = ok && used == cells[3].size();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) throw Error(ErrorCode::kInvalidArgument, fmt::format("field csv: malformed line {}", line_no));
    rows.push_back(row);
  }
  return rows;
}

// Fills slab x position entries; `position` maps a node id to its column.
template <class Position>
std::vector<Eigen::VectorXd> scatter(const std::vector<Row>& rows, int num_slabs, int width,
                                     Position position) {
  std::vector<Eigen::VectorXd> slabs(num_slabs, Eigen::VectorXd::Zero(width));
  std::vector<char> seen(static_cast<std::size_t>(num_slabs) * width, 0);
  for (const auto& r : rows) {
    const int p = position(r.node);
    if (r.slab < 0 || r.slab >= num_slabs || p < 0 || p >= width) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("field csv: entry (slab {}, node {}) out of range", r.slab, r.node));
    }
    slabs[r.slab][p] = r.value;
    seen[static_cast<std::size_t>(r.slab) * width + p] = 1;
  }
  for (char s : seen) {
    if (!s) throw Error(ErrorCode::kDimensionMismatch, "field csv: missing entries");
  }
  return slabs;
}

}  // namespace

void write_field_csv(std::ostream& os, const SpaceTimeField& field, const TimeGrid& grid) {
  os << "slab,t_m,node,value\n";
  for (int m = 0; m < field.num_slabs(); ++m) {
    for (Eigen::Index i = 0; i < field.slabs[m].size(); ++i) {
      os << fmt::format("{},{:.17g},{},{:.17g}\n", m, grid.end(m), i, field.slabs[m][i]);
    }
  }
}

void write_boundary_csv(std::ostream& os, const BoundaryField& field, const TimeGrid& grid,
                        const Mesh& mesh) {
  os << "slab,t_m,node,value\n";
  for (int m = 0; m < field.num_slabs(); ++m) {
    for (Eigen::Index p = 0; p < field.slabs[m].size(); ++p) {
      os << fmt::format("{},{:.17g},{},{:.17g}\n", m, grid.end(m), mesh.boundary_nodes()[p],
                        field.slabs[m][p]);
    }
  }
}

SpaceTimeField read_field_csv(std::istream& is, const TimeGrid& grid, int num_nodes) {
  SpaceTimeField out;
  out.slabs = scatter(read_rows(is), grid.num_slabs(), num_nodes, [](int node) { return node; });
  return out;
}

BoundaryField read_boundary_csv(std::istream& is, const TimeGrid& grid, const Mesh& mesh) {
  BoundaryField out;
  out.slabs = scatter(read_rows(is), grid.num_slabs(), mesh.num_boundary_nodes(), [&](int node) {
    return node >= 0 && node < mesh.num_nodes() ? mesh.boundary_position(node) : -1;
  });
  return out;
}

std::string result_json(const OptimalityResult& result) {
  const nlohmann::json out = {{"version", std::string(version())},
                              {"cost", result.cost},
                              {"residual", result.residual},
                              {"tol", result.tol},
                              {"iterations", result.iterations},
                              {"step", result.step}};
  return out.dump(2);
}

}  // namespace pdbc
