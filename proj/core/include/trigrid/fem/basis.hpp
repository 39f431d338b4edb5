#pragma once

#include "trigrid/common.hpp"

#include <array>
#include <vector>

namespace trigrid {

// Tensor-product Lagrange basis of order p on the unit cube with equispaced
// nodes. Local node a = i + (p+1) j + (p+1)^2 k sits at (i, j, k) / p.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int p);

  int order() const { return p_; }
  int nodes_per_axis() const { return p_ + 1; }
  int size() const { return n_; }
  std::array<int, 3> node_ijk(int a) const;
  Vec3 node_ref(int a) const;

  // Values (and reference gradients) at reference point xi; xi may lie
  // outside the unit cube, which extrapolates the polynomials.
  void eval(const Vec3& xi, double* values, Vec3* gradients = nullptr) const;

  // Stiffness of the unit cube, integral of grad Na . grad Nb; a cube of
  // edge h has stiffness h * reference_stiffness().
  const Eigen::MatrixXd& reference_stiffness() const { return k_ref_; }

 private:
  void eval_1d(double t, double* v, double* d) const;

  int p_;
  int n_;
  Eigen::MatrixXd k_ref_;
};

}  // namespace trigrid
