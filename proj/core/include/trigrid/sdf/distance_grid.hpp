#pragma once

#include "trigrid/sdf/field.hpp"
#include "trigrid/sdf/surface.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace trigrid {

// Narrow-band signed distance sampled on a uniform lattice and stored in
// 8x8x8 node blocks. Blocks away from the surface are not allocated; their
// nodes read as the background clamp +-delta. Values between nodes are
// trilinear.
class SparseDistanceGrid final : public ImplicitField {
 public:
  static constexpr int kBlock = 8;
  using Index3 = std::array<int, 3>;

  // Lattice with spacing h anchored at domain.lo and covering domain.
  SparseDistanceGrid(const Box3& domain, double h, int band_factor);

  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  double resolution() const override { return h_; }

  // Trilinear value and per-cell gradient. Points on a cell face belong to
  // the lower cell. Throws GeometryError outside the lattice box.
  double evaluate(const Vec3& x, Vec3* grad) const;

  double node_value(const Index3& n) const;
  Vec3 node_position(const Index3& n) const;
  bool node_in_stored_block(const Index3& n) const;

  const Box3& box() const { return box_; }
  double spacing() const { return h_; }
  double band() const { return delta_; }
  const Index3& node_counts() const { return nodes_; }
  std::size_t block_count() const { return block_keys_.size(); }

  // Visits every stored block: block coordinates and its kBlock^3 values,
  // x fastest.
  void for_each_block(const std::function<void(const Index3&, const double*)>& fn) const;

  // Construction. Allocates a block (values unset) and returns its storage.
  double* allocate_block(const Index3& block);
  // Assigns the background sign of unallocated blocks by flood fill over
  // block faces; each region takes the majority sign of the allocated node
  // values bordering it. `fallback` decides regions with no allocated
  // neighbour (an empty band).
  void finalize_background(const std::function<double(const Vec3&)>& fallback);

  Index3 block_counts() const { return blocks_; }

 private:
  std::int64_t block_linear(const Index3& b) const {
    return (static_cast<std::int64_t>(b[2]) * blocks_[1] + b[1]) * blocks_[0] + b[0];
  }
  // Slot in block_keys_ or -1.
  int find_block(std::int64_t key) const;
  void rehash(std::size_t capacity);

  Box3 box_;
  double h_;
  double delta_;
  Index3 nodes_;
  Index3 blocks_;

  // Open-addressing table from linear block index to storage slot.
  std::vector<std::int64_t> table_keys_;
  std::vector<int> table_slots_;
  std::vector<std::int64_t> block_keys_;
  std::vector<double> values_;
  // Background sign per block (+1 / -1); only meaningful for unallocated ones.
  std::vector<signed char> background_;
};

// Exact signed distance to the surface at band nodes (|phi| <= band),
// clamped to +-band elsewhere. The lattice box defaults to the surface
// bounds padded by band + 2 cells.
SparseDistanceGrid build_from_surface(const TriangleSurface& surface, double h_g,
                                      int band_factor, const Box3* domain = nullptr);

// Samples a closed-form field on the band nodes of `domain`.
SparseDistanceGrid build_from_analytic(const ImplicitField& field, const Box3& domain,
                                       double h_g, int band_factor);

}  // namespace trigrid
