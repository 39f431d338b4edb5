#pragma once

#include "trigrid/fem/basis.hpp"
#include "trigrid/octree/fe_grid.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace trigrid {

// Global Lagrange nodes of all active and cut leaves, keyed by their
// position on the finest lattice. Nodes are numbered in order of first
// appearance along the Z-curve.
class DofMap {
 public:
  DofMap(const FeGrid& grid, const LagrangeBasis& basis);

  int order() const { return p_; }
  int node_count() const { return static_cast<int>(lattice_.size()); }
  const Lattice3& node_lattice(int n) const { return lattice_[n]; }
  // Node id at a lattice point, or -1.
  int find(const Lattice3& q) const;

  // Leaves carrying DOFs, in Z-order.
  const std::vector<int>& cells() const { return cells_; }
  bool has_nodes(int leaf) const { return offset_[leaf + 1] > offset_[leaf]; }
  std::span<const int> cell_nodes(int leaf) const {
    return {nodes_.data() + offset_[leaf], nodes_.data() + offset_[leaf + 1]};
  }

  // Lattice coordinates of local node a of a leaf.
  static Lattice3 local_node_lattice(const FeCell& c, const LagrangeBasis& basis, int a);
  static std::uint64_t key(const Lattice3& q);

 private:
  int p_;
  std::vector<Lattice3> lattice_;
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<int> cells_;
  std::vector<int> offset_;
  std::vector<int> nodes_;
};

}  // namespace trigrid
