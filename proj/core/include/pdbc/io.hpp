#pragma once

#include <iosfwd>
#include <string>

#include "pdbc/control.hpp"
#include "pdbc/fields.hpp"
#include "pdbc/mesh.hpp"
#include "pdbc/timegrid.hpp"

namespace pdbc {

/// CSV with header `slab,t_m,node,value`, one row per (slab, node), where
/// t_m is the right end point of the slab and values carry 17 significant
/// digits so that reading back is exact.
void write_field_csv(std::ostream& os, const SpaceTimeField& field, const TimeGrid& grid);
/// Same layout; `node` is the global node id of each boundary node.
void write_boundary_csv(std::ostream& os, const BoundaryField& field, const TimeGrid& grid,
                        const Mesh& mesh);

/// Inverse of write_field_csv. Throws Error(kInvalidArgument) for malformed
/// rows and Error(kDimensionMismatch) for missing or out-of-range entries.
SpaceTimeField read_field_csv(std::istream& is, const TimeGrid& grid, int num_nodes);
BoundaryField read_boundary_csv(std::istream& is, const TimeGrid& grid, const Mesh& mesh);

/// cost, residual, tol, iterations and step of a control solve plus the
/// library version.
std::string result_json(const OptimalityResult& result);

}  // namespace pdbc
