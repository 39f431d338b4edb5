#pragma once

#include "trigrid/fem/assembly.hpp"

#include <functional>
#include <vector>

namespace trigrid {

// Finite element field u = E u_free on a classified grid.
class FeSolution {
 public:
  FeSolution(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
             const ConstraintMap& constraints, const Eigen::VectorXd& free_values);

  // Value (and gradient) at x. Throws GeometryError outside the box or in a
  // leaf without DOFs.
  double value(const Vec3& x, Vec3* grad = nullptr) const;
  // Evaluation inside a known leaf.
  double value_in(int leaf, const Vec3& x, Vec3* grad = nullptr) const;

  const Eigen::VectorXd& node_values() const { return nodal_; }

 private:
  const FeGrid& grid_;
  const DofMap& dofs_;
  const LagrangeBasis& basis_;
  Eigen::VectorXd nodal_;
};

struct ErrorNorms {
  double l2_error = 0.0;
  double l2_norm = 0.0;  // of the discrete solution
  double h1_error = 0.0;
  double h1_norm = 0.0;
  double l2_relative() const { return l2_error / l2_norm; }
  double h1_relative() const { return h1_error / h1_norm; }
};

// Errors over the domain only, with the assembly's volume quadrature on cut
// leaves and a (degree + 2)-exact Gauss rule on active leaves.
// `cell_h1_error_sq`, if given, receives the squared H1-seminorm error per leaf.
ErrorNorms error_norms(const FeSolution& uh, const FeGrid& grid, const DofMap& dofs,
                       const CutCellQuadrature& quad, const std::function<double(const Vec3&)>& u,
                       const std::function<Vec3(const Vec3&)>& grad_u,
                       std::vector<double>* cell_h1_error_sq = nullptr);

}  // namespace trigrid
