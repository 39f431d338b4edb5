#pragma once

#include "trigrid/cutquad/decomposition.hpp"
#include "trigrid/octree/partition.hpp"
#include "trigrid/sdf/distance_grid.hpp"

#include <filesystem>

namespace trigrid {

class FeSolution;
class CutCellQuadrature;
class DofMap;

// One legacy-VTK structured-points file per stored block, named
// block_<i>_<j>_<k>.vtk, inside `directory`. Returns the number of files.
int write_band_vtk(const std::filesystem::path& directory, const SparseDistanceGrid& grid);

// Leaves as hexahedra in Z-order with cell data "class", "level" and, when a
// partition is given, "subdomain".
void write_grid_vtk(const std::filesystem::path& path, const FeGrid& grid,
                    const Partition* partition = nullptr);

// Tetrahedra and boundary triangles; cell data "kind" (0 tet, 1 triangle).
void write_decomposition_vtk(const std::filesystem::path& path, const std::vector<Tet>& tets,
                             const std::vector<BoundaryTriangle>& triangles);

// Solution restricted to the domain: active leaves as hexahedra and cut
// leaves through their tetrahedra, with point data "u".
void write_solution_vtk(const std::filesystem::path& path, const FeGrid& grid, const DofMap& dofs,
                        const FeSolution& solution, const CutCellQuadrature& quad);

}  // namespace trigrid
