#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace trigrid {

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
  std::vector<double> history;  // relative residual norm per iteration, starting at 0
};

// Preconditioned conjugate gradients from x0 = 0. Stops when
// |b - A x| / |b| <= tol (recursively updated residual). Throws SolverError
// when p^T A p <= 0.
PcgResult pcg(const LinearOperator& apply_A, const LinearOperator& apply_M_inv,
              const Eigen::VectorXd& b, double tol, int max_iter);

LinearOperator identity_operator();
LinearOperator jacobi_operator(const Eigen::VectorXd& diagonal);

}  // namespace trigrid
