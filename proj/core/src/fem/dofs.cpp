#include "trigrid/fem/dofs.hpp"

namespace trigrid {

std::uint64_t DofMap::key(const Lattice3& q) {
  return static_cast<std::uint64_t>(q[0]) | static_cast<std::uint64_t>(q[1]) << 21 |
         static_cast<std::uint64_t>(q[2]) << 42;
}

Lattice3 DofMap::local_node_lattice(const FeCell& c, const LagrangeBasis& basis, int a) {
  const auto ijk = basis.node_ijk(a);
  const std::int32_t step = FeGrid::lattice_size(c.level) / basis.order();
  return {c.anchor[0] + ijk[0] * step, c.anchor[1] + ijk[1] * step, c.anchor[2] + ijk[2] * step};
}

DofMap::DofMap(const FeGrid& grid, const LagrangeBasis& basis) : p_(basis.order()) {
  const int n = static_cast<int>(grid.size());
  offset_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const FeCell& c = grid.leaf(i);
    if (c.label == CellClass::Unclassified) throw Error("grid must be classified before numbering");
    offset_[i + 1] = offset_[i];
    if (!is_discretized(c.label)) continue;
    cells_.push_back(i);
    for (int a = 0; a < basis.size(); ++a) {
      const Lattice3 q = local_node_lattice(c, basis, a);
      auto [it, inserted] = index_.emplace(key(q), static_cast<int>(lattice_.size()));
      if (inserted) lattice_.push_back(q);
      nodes_.push_back(it->second);
    }
    offset_[i + 1] += basis.size();
  }
}

int DofMap::find(const Lattice3& q) const {
  auto it = index_.find(key(q));
  return it == index_.end() ? -1 : it->second;
}

}  // namespace trigrid
