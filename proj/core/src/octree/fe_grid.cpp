#include "trigrid/octree/fe_grid.hpp"

#include "trigrid/octree/morton.hpp"

#include <algorithm>
#include <cmath>

namespace trigrid {

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Unclassified: return "unclassified";
    case CellClass::Active: return "active";
    case CellClass::Inactive: return "inactive";
    case CellClass::CutOrdinary: return "cut-ordinary";
    case CellClass::CutExtraordinary: return "cut-extraordinary";
  }
  return "?";
}

std::uint64_t FeGrid::node_code(int level, const Lattice3& a) {
  const int shift = kLatticeLevel - level;
  return (std::uint64_t{1} << (3 * level)) |
         morton::encode(static_cast<std::uint32_t>(a[0] >> shift),
                        static_cast<std::uint32_t>(a[1] >> shift),
                        static_cast<std::uint32_t>(a[2] >> shift));
}

FeGrid FeGrid::build_base(const Box3& box, int base_refinements) {
  const Vec3 e = box.extent();
  if (!(e.minCoeff() > 0.0) || std::abs(e.maxCoeff() - e.minCoeff()) > 1e-12 * e.maxCoeff()) {
    throw ConfigError("finite element box must be a cube with positive edge");
  }
  if (base_refinements < 0 || base_refinements > kMaxLevel) {
    throw ConfigError("base refinements must be in [0, 19]");
  }
  FeGrid g;
  g.box_ = {box.lo, box.lo + Vec3::Constant(e[0])};
  const std::int32_t n = std::int32_t{1} << base_refinements;
  const std::int32_t s = lattice_size(base_refinements);
  g.leaves_.reserve(static_cast<std::size_t>(n) * n * n);
  for (std::int32_t z = 0; z < n; ++z)
    for (std::int32_t y = 0; y < n; ++y)
      for (std::int32_t x = 0; x < n; ++x) {
        FeCell c;
        c.anchor = {x * s, y * s, z * s};
        c.level = base_refinements;
        c.zkey = morton::encode(c.anchor[0], c.anchor[1], c.anchor[2]);
        g.leaves_.push_back(c);
      }
  std::sort(g.leaves_.begin(), g.leaves_.end(),
            [](const FeCell& a, const FeCell& b) { return a.zkey < b.zkey; });
  g.rebuild_index();
  return g;
}

void FeGrid::rebuild_index() {
  nodes_.clear();
  nodes_.reserve(leaves_.size() * 8 / 7 + 16);
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const FeCell& c = leaves_[i];
    nodes_[node_code(c.level, c.anchor)] = static_cast<int>(i);
    for (int l = c.level - 1; l >= 0; --l) {
      const std::int32_t s = lattice_size(l);
      const Lattice3 a{c.anchor[0] / s * s, c.anchor[1] / s * s, c.anchor[2] / s * s};
      if (!nodes_.emplace(node_code(l, a), -1).second) break;
    }
  }
}

Box3 FeGrid::cell_box(int i) const {
  const FeCell& c = leaves_[i];
  const double h = lattice_unit();
  const Vec3 lo = box_.lo + h * Vec3(c.anchor[0], c.anchor[1], c.anchor[2]);
  return {lo, lo + Vec3::Constant(cell_edge(i))};
}

Vec3 FeGrid::to_physical(const Lattice3& q) const {
  return box_.lo + lattice_unit() * Vec3(q[0], q[1], q[2]);
}

Vec3 FeGrid::to_physical(double qx, double qy, double qz) const {
  return box_.lo + lattice_unit() * Vec3(qx, qy, qz);
}

int FeGrid::find(int level, const Lattice3& anchor) const {
  auto it = nodes_.find(node_code(level, anchor));
  return it == nodes_.end() ? -2 : it->second;
}

int FeGrid::locate_lattice(const Lattice3& q) const {
  Lattice3 a{0, 0, 0};
  for (int l = 0; l <= kMaxLevel; ++l) {
    const std::int32_t s = lattice_size(l);
    a = {q[0] / s * s, q[1] / s * s, q[2] / s * s};
    const int r = find(l, a);
    if (r >= 0) return r;
    if (r == -2) break;
  }
  throw GeometryError("lattice point not covered by the octree");
}

int FeGrid::locate(const Vec3& x) const {
  const double tol = 1e-12 * box_edge();
  if (!box_.contains(x, tol)) throw GeometryError("point outside the octree box: " + format_point(x));
  Lattice3 q;
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor((x[a] - box_.lo[a]) / lattice_unit());
    q[a] = static_cast<std::int32_t>(std::clamp(t, 0.0, static_cast<double>(kLatticeSize - 1)));
  }
  return locate_lattice(q);
}

std::vector<int> FeGrid::leaves_touching(const Lattice3& lo, const Lattice3& hi) const {
  std::vector<int> out;
  struct Item {
    int level;
    Lattice3 anchor;
  };
  std::vector<Item> stack{{0, {0, 0, 0}}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const int r = find(it.level, it.anchor);
    if (r == -2) continue;
    if (r >= 0) {
      out.push_back(r);
      continue;
    }
    const std::int32_t h = lattice_size(it.level + 1);
    for (int c = 7; c >= 0; --c) {
      const Lattice3 a{it.anchor[0] + (c & 1) * h, it.anchor[1] + ((c >> 1) & 1) * h,
                       it.anchor[2] + ((c >> 2) & 1) * h};
      bool meets = true;
      for (int d = 0; d < 3; ++d) meets = meets && a[d] <= hi[d] && a[d] + h >= lo[d];
      if (meets) stack.push_back({it.level + 1, a});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> FeGrid::face_neighbors(int i) const {
  const FeCell& c = leaves_[i];
  const std::int32_t s = lattice_size(c.level);
  std::vector<int> out;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const std::int32_t plane = c.anchor[axis] + side * s;
      if (plane == 0 || plane == kLatticeSize) continue;
      // Open face rectangle, shrunk by one unit so that edge-adjacent leaves
      // are excluded; leaves are at least two units wide.
      Lattice3 lo, hi;
      for (int d = 0; d < 3; ++d) {
        lo[d] = c.anchor[d] + 1;
        hi[d] = c.anchor[d] + s - 1;
      }
      lo[axis] = hi[axis] = side ? plane + 1 : plane - 1;
      for (int j : leaves_touching(lo, hi)) out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void FeGrid::split(const std::vector<char>& flags) {
  std::vector<FeCell> next;
  next.reserve(leaves_.size() + 7 * static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1)));
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const FeCell& c = leaves_[i];
    if (!flags[i] || c.level >= kMaxLevel) {
      next.push_back(c);
      continue;
    }
    const std::int32_t h = lattice_size(c.level + 1);
    // Children in Morton order keep the leaf list sorted.
    for (int k = 0; k < 8; ++k) {
      FeCell child;
      child.level = c.level + 1;
      child.anchor = {c.anchor[0] + (k & 1) * h, c.anchor[1] + ((k >> 1) & 1) * h,
                      c.anchor[2] + ((k >> 2) & 1) * h};
      child.zkey = morton::encode(child.anchor[0], child.anchor[1], child.anchor[2]);
      next.push_back(child);
    }
  }
  leaves_ = std::move(next);
  rebuild_index();
}

std::vector<char> FeGrid::balance_flags() const {
  std::vector<char> flags(leaves_.size(), 0);
  for (const FeCell& c : leaves_) {
    if (c.level < 2) continue;
    const std::int32_t s = lattice_size(c.level);
    for (int axis = 0; axis < 3; ++axis) {
      for (int side = 0; side < 2; ++side) {
        Lattice3 q{c.anchor[0] + s / 2, c.anchor[1] + s / 2, c.anchor[2] + s / 2};
        q[axis] = side ? c.anchor[axis] + s : c.anchor[axis] - 1;
        if (q[axis] < 0 || q[axis] >= kLatticeSize) continue;
        const int j = locate_lattice(q);
        if (leaves_[j].level < c.level - 1) flags[j] = 1;
      }
    }
  }
  return flags;
}

std::size_t FeGrid::balance() {
  std::size_t total = 0;
  while (true) {
    const auto flags = balance_flags();
    const auto n = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    if (n == 0) return total;
    total += n;
    split(flags);
  }
}

bool FeGrid::is_balanced() const {
  const auto flags = balance_flags();
  return std::none_of(flags.begin(), flags.end(), [](char f) { return f != 0; });
}

void FeGrid::refine(const std::vector<char>& flags) {
  if (flags.size() != leaves_.size()) throw Error("refinement flags do not match the leaf count");
  split(flags);
  balance();
}

int FeGrid::max_leaf_level() const {
  int m = 0;
  for (const auto& c : leaves_) m = std::max(m, c.level);
  return m;
}

}  // namespace trigrid
