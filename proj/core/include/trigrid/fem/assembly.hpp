#pragma once

#include "trigrid/fem/constraints.hpp"
#include "trigrid/solver/sparse.hpp"

#include <functional>
#include <vector>

namespace trigrid {

// Data of -laplace(u) = f in the domain, u = u_D on the Dirichlet part and
// n . grad(u) = g on the Neumann part of the boundary.
struct PoissonData {
  std::function<double(const Vec3&)> f;
  std::function<double(const Vec3&)> u_dirichlet;
  // Neumann flux given the point and the outward normal.
  std::function<double(const Vec3&, const Vec3&)> g_neumann;
  // True where a boundary point belongs to the Neumann part; empty means the
  // whole boundary is Dirichlet.
  std::function<bool(const Vec3&)> is_neumann;
};

// Nitsche penalty per cut leaf.
//  Fixed: gamma = gamma0 / h.
//  LocalEigen: gamma = max(gamma0 / h, 2 lambda), lambda the largest
//  eigenvalue of |dn v|^2 on the leaf's boundary part against |grad v|^2 on
//  its inside part. Every element matrix is then positive definite on its
//  own, which subassembled (substructured) matrices need.
enum class PenaltyMode { Fixed, LocalEigen };

struct LinearSystem {
  CsrMatrix A;
  Eigen::VectorXd b;
};

// Element contribution restricted to free DOFs: K_e = E^T K E, f_e = E^T f.
struct ElementSystem {
  std::vector<int> dofs;  // sorted free DOF indices
  Eigen::MatrixXd K;
  Eigen::VectorXd f;
};

// Symmetric Nitsche discretization. Active leaves use the exact scaled
// reference stiffness; cut leaves integrate over their decomposition with
// penalty gamma = gamma0 / h on the boundary triangles.
class Assembler {
 public:
  Assembler(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
            const ConstraintMap& constraints, const CutCellQuadrature& quad,
            const PoissonData& data, double gamma0, PenaltyMode penalty = PenaltyMode::LocalEigen);

  // Contribution over the leaf's local Lagrange nodes.
  void local_element(int leaf, Eigen::MatrixXd& K, Eigen::VectorXd& f) const;
  // Penalty used on a cut leaf (gamma0 / h for other leaves).
  double penalty(int leaf) const;
  void element(int leaf, ElementSystem& out) const;
  std::vector<int> element_dofs(int leaf) const;

  LinearSystem assemble() const;

  const DofMap& dofs() const { return dofs_; }
  const ConstraintMap& constraints() const { return constraints_; }
  int free_count() const { return constraints_.free_count(); }

 private:
  const FeGrid& grid_;
  const DofMap& dofs_;
  const LagrangeBasis& basis_;
  const ConstraintMap& constraints_;
  const CutCellQuadrature& quad_;
  PoissonData data_;
  double gamma0_;
  PenaltyMode penalty_;
  CubeRule source_rule_;
};

}  // namespace trigrid
