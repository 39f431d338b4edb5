#pragma once

#include "trigrid/fem/cut_cells.hpp"
#include "trigrid/fem/dofs.hpp"

#include <span>
#include <vector>

namespace trigrid {

enum class NodeKind : std::uint8_t { Free, Hanging, Critical, Void };

// Per-node active support fractions and extrapolation donors.
struct CriticalDetection {
  std::vector<double> fraction;  // inside volume / volume of the leaves touching the node
  std::vector<char> critical;
  std::vector<int> donor;        // donor leaf per critical node, else -1
  int count = 0;
};

// Coarsest active/cut leaf containing each node, when the node is not one of
// that leaf's own lattice nodes (a hanging node); -1 otherwise.
std::vector<int> find_hanging(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis);

// Flags non-hanging nodes whose fraction is below epsilon and picks a donor
// for each among the active leaves within two vertex-adjacency steps of the
// node whose nodes are all non-critical: leaves without hanging nodes first,
// then the nearest centroid. A leaf with hanging nodes is skipped when its
// masters depend on the node, which would close a constraint loop.
// Throws GeometryError when a critical node has no such donor.
CriticalDetection detect_critical(const FeGrid& grid, const DofMap& dofs,
                                  const CutCellQuadrature& quad, const std::vector<int>& hanging,
                                  double epsilon);

struct ConstraintOptions {
  bool stabilize = true;
  double epsilon = 0.125;
};

// Linear map u = E u_free from free coefficients to all node values.
// Hanging rows hold the coarse leaf's shape values at the node, critical rows
// the donor's shape values extrapolated to the node; chains are expanded
// down to free nodes. Void nodes (no inside support) map to zero.
class ConstraintMap {
 public:
  int node_count() const { return static_cast<int>(kind_.size()); }
  int free_count() const { return static_cast<int>(free_nodes_.size()); }
  NodeKind kind(int node) const { return kind_[node]; }
  int free_index(int node) const { return free_index_[node]; }
  int free_node(int f) const { return free_nodes_[f]; }
  std::span<const int> cols(int node) const {
    return {cols_.data() + ptr_[node], cols_.data() + ptr_[node + 1]};
  }
  std::span<const double> vals(int node) const {
    return {vals_.data() + ptr_[node], vals_.data() + ptr_[node + 1]};
  }
  // Longest chain of constraint rows followed while resolving.
  int max_depth() const { return max_depth_; }
  int count(NodeKind k) const;

  Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;

  const CriticalDetection& critical() const { return critical_; }
  const std::vector<int>& hanging_leaf() const { return hanging_; }
  // Donor leaves whose shape functions enter the node's row, through chains.
  const std::vector<int>& donor_leaves(int node) const { return donors_[node]; }

  friend ConstraintMap build_constraints(const FeGrid&, const DofMap&, const LagrangeBasis&,
                                         const CutCellQuadrature&, const ConstraintOptions&);

 private:
  std::vector<NodeKind> kind_;
  std::vector<int> free_index_;
  std::vector<int> free_nodes_;
  std::vector<int> ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  int max_depth_ = 0;
  CriticalDetection critical_;
  std::vector<int> hanging_;
  std::vector<std::vector<int>> donors_;
};

ConstraintMap build_constraints(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
                                const CutCellQuadrature& quad, const ConstraintOptions& options);

}  // namespace trigrid

namespace trigrid {

// Leaf that should own each leaf in a domain decomposition: leaves whose
// nodes are extrapolated from a donor are grouped with that donor (groups
// joined transitively) and follow the group's smallest donor; others own
// themselves. Keeping a group in one subdomain keeps the extrapolated
// coefficients visible to the donor's stiffness, so local matrices stay
// nonsingular.
std::vector<int> extrapolation_owner(const FeGrid& grid, const DofMap& dofs, const ConstraintMap& constraints);

}  // namespace trigrid
