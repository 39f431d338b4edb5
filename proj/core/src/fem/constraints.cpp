#include "trigrid/fem/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace trigrid {

namespace {

Vec3 reference_coords(const FeCell& c, const Lattice3& q) {
  const double s = FeGrid::lattice_size(c.level);
  return Vec3((q[0] - c.anchor[0]) / s, (q[1] - c.anchor[1]) / s, (q[2] - c.anchor[2]) / s);
}

using Row = std::vector<std::pair<int, double>>;

// Shape values of `leaf` at lattice point q, as a row over global nodes.
Row shape_row(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis, int leaf,
              const Lattice3& q) {
  std::vector<double> N(basis.size());
  basis.eval(reference_coords(grid.leaf(leaf), q), N.data());
  const auto nodes = dofs.cell_nodes(leaf);
  Row row;
  for (int a = 0; a < basis.size(); ++a) {
    if (std::abs(N[a]) > 1e-14) row.emplace_back(nodes[a], N[a]);
  }
  return row;
}

}  // namespace

std::vector<int> find_hanging(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis) {
  std::vector<int> hanging(dofs.node_count(), -1);
  const int p = basis.order();
  for (int n = 0; n < dofs.node_count(); ++n) {
    const Lattice3& q = dofs.node_lattice(n);
    int coarsest = -1;
    for (int leaf : grid.leaves_containing(q)) {
      if (!is_discretized(grid.leaf(leaf).label)) continue;
      if (coarsest < 0 || grid.leaf(leaf).level < grid.leaf(coarsest).level) coarsest = leaf;
    }
    if (coarsest < 0) continue;
    const FeCell& c = grid.leaf(coarsest);
    const std::int32_t step = FeGrid::lattice_size(c.level) / p;
    bool on_lattice = true;
    for (int a = 0; a < 3; ++a) on_lattice = on_lattice && (q[a] - c.anchor[a]) % step == 0;
    if (!on_lattice) hanging[n] = coarsest;
  }
  return hanging;
}

CriticalDetection detect_critical(const FeGrid& grid, const DofMap& dofs,
                                  const CutCellQuadrature& quad, const std::vector<int>& hanging,
                                  double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  const int nn = dofs.node_count();
  CriticalDetection out;
  out.fraction.assign(nn, 0.0);
  out.critical.assign(nn, 0);
  out.donor.assign(nn, -1);

  // Assembly-like accumulation: each leaf adds its inside and total volume
  // to the nodes on its closure.
  std::vector<double> total(nn, 0.0);
  for (int n = 0; n < nn; ++n) {
    for (int leaf : grid.leaves_containing(dofs.node_lattice(n))) {
      out.fraction[n] += quad.inside_volume(leaf);
      total[n] += std::pow(grid.cell_edge(leaf), 3);
    }
  }
  for (int n = 0; n < nn; ++n) {
    out.fraction[n] /= total[n];
    if (hanging[n] < 0 && out.fraction[n] > 0.0 && out.fraction[n] < epsilon) {
      out.critical[n] = 1;
      ++out.count;
    }
  }

  auto touching = [&](int leaf) {
    const FeCell& c = grid.leaf(leaf);
    const std::int32_t s = FeGrid::lattice_size(c.level);
    return grid.leaves_touching(c.anchor, {c.anchor[0] + s, c.anchor[1] + s, c.anchor[2] + s});
  };
  // Dependencies of a node on other nodes through hanging-node masters and
  // already chosen donors. Donors that would close a loop are skipped.
  std::vector<int> stamp(nn, -1);
  int query = 0;
  auto reaches = [&](int from_leaf, int target) {
    ++query;
    std::vector<int> stack;
    for (int m : dofs.cell_nodes(from_leaf)) stack.push_back(m);
    while (!stack.empty()) {
      const int m = stack.back();
      stack.pop_back();
      if (m == target) return true;
      if (stamp[m] == query) continue;
      stamp[m] = query;
      const int via = hanging[m] >= 0 ? hanging[m] : (out.critical[m] ? out.donor[m] : -1);
      if (via < 0) continue;
      for (int k : dofs.cell_nodes(via)) stack.push_back(k);
    }
    return false;
  };
  for (int n = 0; n < nn; ++n) {
    if (!out.critical[n]) continue;
    const Vec3 x = grid.to_physical(dofs.node_lattice(n));
    std::vector<int> ring = grid.leaves_containing(dofs.node_lattice(n));
    for (int step = 0; step < 2; ++step) {
      std::vector<int> next;
      for (int leaf : ring) {
        const auto t = touching(leaf);
        next.insert(next.end(), t.begin(), t.end());
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      ring = std::move(next);
    }
    // Nearest donor first, preferring donors without hanging nodes.
    std::vector<std::tuple<int, double, int>> candidates;
    for (int leaf : ring) {
      if (grid.leaf(leaf).label != CellClass::Active) continue;
      const auto nodes = dofs.cell_nodes(leaf);
      if (std::any_of(nodes.begin(), nodes.end(), [&](int m) { return out.critical[m] != 0; })) continue;
      const int has_hanging = std::any_of(nodes.begin(), nodes.end(), [&](int m) { return hanging[m] >= 0; });
      candidates.emplace_back(has_hanging, (grid.cell_center(leaf) - x).norm(), leaf);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [has_hanging, d, leaf] : candidates) {
      if (has_hanging && reaches(leaf, n)) continue;
      out.donor[n] = leaf;
      break;
    }
    if (out.donor[n] < 0) {
      throw GeometryError("no extrapolation donor for critical node at " + format_point(x) +
                          " (geometry too coarse relative to the grid)");
    }
  }
  return out;
}

int ConstraintMap::count(NodeKind k) const {
  return static_cast<int>(std::count(kind_.begin(), kind_.end(), k));
}

Eigen::VectorXd ConstraintMap::expand(const Eigen::VectorXd& free_values) const {
  if (free_values.size() != free_count()) throw Error("free vector has the wrong size");
  Eigen::VectorXd u(node_count());
  for (int n = 0; n < node_count(); ++n) {
    double s = 0.0;
    for (int k = ptr_[n]; k < ptr_[n + 1]; ++k) s += vals_[k] * free_values[cols_[k]];
    u[n] = s;
  }
  return u;
}

ConstraintMap build_constraints(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
                                const CutCellQuadrature& quad, const ConstraintOptions& options) {
  ConstraintMap E;
  const int nn = dofs.node_count();
  E.hanging_ = find_hanging(grid, dofs, basis);
  E.critical_ = detect_critical(grid, dofs, quad, E.hanging_, options.epsilon);
  if (!options.stabilize) {
    std::fill(E.critical_.critical.begin(), E.critical_.critical.end(), 0);
    std::fill(E.critical_.donor.begin(), E.critical_.donor.end(), -1);
    E.critical_.count = 0;
  }

  E.kind_.assign(nn, NodeKind::Free);
  std::vector<Row> raw(nn);
  for (int n = 0; n < nn; ++n) {
    if (E.hanging_[n] >= 0) {
      E.kind_[n] = NodeKind::Hanging;
      raw[n] = shape_row(grid, dofs, basis, E.hanging_[n], dofs.node_lattice(n));
    } else if (E.critical_.fraction[n] == 0.0) {
      E.kind_[n] = NodeKind::Void;
    } else if (E.critical_.critical[n]) {
      E.kind_[n] = NodeKind::Critical;
      raw[n] = shape_row(grid, dofs, basis, E.critical_.donor[n], dofs.node_lattice(n));
    }
  }
  E.free_index_.assign(nn, -1);
  for (int n = 0; n < nn; ++n) {
    if (E.kind_[n] == NodeKind::Free) {
      E.free_index_[n] = static_cast<int>(E.free_nodes_.size());
      E.free_nodes_.push_back(n);
    }
  }

  // Depth-first expansion of constraint chains with cycle detection.
  std::vector<Row> expanded(nn);
  std::vector<int> depth(nn, 0);
  std::vector<char> state(nn, 0);  // 0 new, 1 on stack, 2 done
  E.donors_.assign(nn, {});
  auto resolve = [&](auto&& self, int n) -> void {
    if (state[n] == 2) return;
    if (state[n] == 1) {
      throw Error("constraint cycle through node at " +
                  format_point(grid.to_physical(dofs.node_lattice(n))));
    }
    state[n] = 1;
    Row acc;
    if (E.kind_[n] == NodeKind::Free) {
      acc.emplace_back(E.free_index_[n], 1.0);
    } else {
      std::map<int, double> sum;
      auto& donors = E.donors_[n];
      if (E.kind_[n] == NodeKind::Critical) donors.push_back(E.critical_.donor[n]);
      for (const auto& [m, c] : raw[n]) {
        self(self, m);
        donors.insert(donors.end(), E.donors_[m].begin(), E.donors_[m].end());
        depth[n] = std::max(depth[n], depth[m] + 1);
        for (const auto& [f, d] : expanded[m]) sum[f] += c * d;
      }
      for (const auto& [f, v] : sum)
        if (std::abs(v) > 1e-15) acc.emplace_back(f, v);
    }
    std::sort(E.donors_[n].begin(), E.donors_[n].end());
    E.donors_[n].erase(std::unique(E.donors_[n].begin(), E.donors_[n].end()), E.donors_[n].end());
    expanded[n] = std::move(acc);
    state[n] = 2;
  };
  for (int n = 0; n < nn; ++n) resolve(resolve, n);

  E.ptr_.assign(nn + 1, 0);
  for (int n = 0; n < nn; ++n) {
    E.ptr_[n + 1] = E.ptr_[n] + static_cast<int>(expanded[n].size());
    E.max_depth_ = std::max(E.max_depth_, depth[n]);
  }
  E.cols_.reserve(E.ptr_[nn]);
  E.vals_.reserve(E.ptr_[nn]);
  for (int n = 0; n < nn; ++n) {
    for (const auto& [f, v] : expanded[n]) {
      E.cols_.push_back(f);
      E.vals_.push_back(v);
    }
  }
  return E;
}

}  // namespace trigrid

namespace trigrid {

std::vector<int> extrapolation_owner(const FeGrid& grid, const DofMap& dofs, const ConstraintMap& constraints) {
  const int n = static_cast<int>(grid.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  // Roots are the smallest leaf index of each group.
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  std::vector<char> donor(n, 0);
  for (int leaf : dofs.cells()) {
    for (int node : dofs.cell_nodes(leaf)) {
      for (int d : constraints.donor_leaves(node)) {
        donor[d] = 1;
        unite(leaf, d);
      }
    }
  }
  // Each group follows its smallest donor.
  std::vector<int> owner_of_root(n, -1);
  for (int leaf = 0; leaf < n; ++leaf) {
    if (!donor[leaf]) continue;
    const int r = find(leaf);
    if (owner_of_root[r] < 0) owner_of_root[r] = leaf;
  }
  std::vector<int> owner(n);
  for (int leaf = 0; leaf < n; ++leaf) {
    const int o = owner_of_root[find(leaf)];
    owner[leaf] = o >= 0 ? o : leaf;
  }
  return owner;
}

}  // namespace trigrid
