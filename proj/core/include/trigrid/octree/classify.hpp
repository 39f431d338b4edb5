#pragma once

#include "trigrid/octree/fe_grid.hpp"
#include "trigrid/sdf/field.hpp"

namespace trigrid {

struct ClassifyOptions {
  // Spacing of the supersampling lattice for neighbours of cut cells; the
  // effective spacing is max(h_sample, h_cell / 16). 0 disables supersampling.
  double h_sample = 0.0;
  double cos_theta = 0.3;
};

struct ClassifyStats {
  std::size_t active = 0;
  std::size_t inactive = 0;
  std::size_t cut_ordinary = 0;
  std::size_t cut_extraordinary = 0;
  std::size_t supersampled = 0;  // neighbours examined on the fine lattice
  std::size_t promoted = 0;      // of which found to be cut
};

// Labels every leaf from the signs and normals of phi at its vertices, then
// supersamples the face neighbours of cut cells once. phi = 0 counts as
// inside.
ClassifyStats classify(FeGrid& grid, const ImplicitField& phi, const ClassifyOptions& options);

// Sign-change test on a cell-aligned lattice with n intervals per axis.
bool lattice_has_sign_change(const ImplicitField& phi, const Box3& cell, int n);

// Repeats `levels` sweeps of: classify, split every cut leaf wider than
// h_min, rebalance. Warns when leaves become finer than the field's
// resolution. The grid is classified on return.
void refine_toward_boundary(FeGrid& grid, const ImplicitField& phi, int levels, double h_min,
                            const ClassifyOptions& options);

// Refines every leaf that may meet the domain down to `level`; a leaf is
// skipped only when phi at its centre proves it lies outside. The grid is
// classified on return.
void refine_to_level_in_domain(FeGrid& grid, const ImplicitField& phi, int level,
                               const ClassifyOptions& options);

}  // namespace trigrid
