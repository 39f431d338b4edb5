#pragma once

#include "trigrid/common.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace trigrid {

enum class CellClass : std::uint8_t { Unclassified, Active, Inactive, CutOrdinary, CutExtraordinary };

inline bool is_cut(CellClass c) {
  return c == CellClass::CutOrdinary || c == CellClass::CutExtraordinary;
}
// Cells that carry degrees of freedom.
inline bool is_discretized(CellClass c) { return c == CellClass::Active || is_cut(c); }

const char* to_string(CellClass c);

// Integer coordinates on the finest node lattice; a cell at level l spans
// 2^(kLatticeLevel - l) lattice units per axis.
using Lattice3 = std::array<std::int32_t, 3>;

struct FeCell {
  Lattice3 anchor{};
  int level = 0;
  std::uint64_t zkey = 0;  // Morton code of the anchor on the finest lattice
  CellClass label = CellClass::Unclassified;
};

// Octree of hexahedral cells over a cubic box. Leaves are kept in Z-curve
// order; a hash map over all tree nodes serves point location and region
// queries by descent from the root.
class FeGrid {
 public:
  static constexpr int kMaxLevel = 19;
  static constexpr int kLatticeLevel = 20;
  static constexpr std::int32_t kLatticeSize = 1 << kLatticeLevel;

  FeGrid() = default;

  // Uniform grid of 8^base_refinements leaves. The box must be a cube.
  static FeGrid build_base(const Box3& box, int base_refinements);

  const Box3& box() const { return box_; }
  double box_edge() const { return box_.hi[0] - box_.lo[0]; }
  std::size_t size() const { return leaves_.size(); }
  const std::vector<FeCell>& leaves() const { return leaves_; }
  const FeCell& leaf(int i) const { return leaves_[i]; }
  void set_label(int i, CellClass c) { leaves_[i].label = c; }

  static std::int32_t lattice_size(int level) { return std::int32_t{1} << (kLatticeLevel - level); }
  double cell_edge(int i) const { return box_edge() / (1 << leaves_[i].level); }
  double lattice_unit() const { return box_edge() / kLatticeSize; }
  Box3 cell_box(int i) const;
  Vec3 cell_center(int i) const { return cell_box(i).center(); }
  Vec3 to_physical(const Lattice3& q) const;
  Vec3 to_physical(double qx, double qy, double qz) const;

  // Leaf containing x (half-open cells, upper boundary folded inward).
  // Throws GeometryError outside the box.
  int locate(const Vec3& x) const;
  int locate_lattice(const Lattice3& q) const;

  // Leaf index of the node (level, anchor), -1 for an internal node, -2 if
  // the node is not part of the tree.
  int find(int level, const Lattice3& anchor) const;

  // Leaves sharing a face (of positive area) with leaf i.
  std::vector<int> face_neighbors(int i) const;
  // Leaves whose closed box meets the closed lattice box [lo, hi].
  std::vector<int> leaves_touching(const Lattice3& lo, const Lattice3& hi) const;
  std::vector<int> leaves_containing(const Lattice3& q) const { return leaves_touching(q, q); }

  // Splits flagged leaves into 8 children (labels reset) and restores the
  // face 2:1 balance. Leaves at kMaxLevel are not split.
  void refine(const std::vector<char>& flags);
  // Number of leaves split to restore balance.
  std::size_t balance();
  bool is_balanced() const;
  int max_leaf_level() const;

 private:
  static std::uint64_t node_code(int level, const Lattice3& anchor);
  void split(const std::vector<char>& flags);
  void rebuild_index();
  // Balance violations: coarse leaves face-adjacent to a leaf two levels finer.
  std::vector<char> balance_flags() const;

  Box3 box_;
  std::vector<FeCell> leaves_;
  std::unordered_map<std::uint64_t, int> nodes_;
};

}  // namespace trigrid
