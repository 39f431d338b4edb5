#include "trigrid/solver/pcg.hpp"

#include "trigrid/common.hpp"

#include <cmath>

namespace trigrid {

PcgResult pcg(const LinearOperator& apply_A, const LinearOperator& apply_M_inv,
              const Eigen::VectorXd& b, double tol, int max_iter) {
  PcgResult res;
  const Eigen::Index n = b.size();
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  res.history.push_back(bnorm > 0.0 ? 1.0 : 0.0);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z(n);
  Eigen::VectorXd q(n);
  apply_M_inv(r, z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    apply_A(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) {
      throw SolverError("conjugate gradients detected a non-positive curvature p^T A p = " +
                        std::to_string(pq) + " at iteration " + std::to_string(it));
    }
    const double alpha = rz / pq;
    res.x += alpha * p;
    r -= alpha * q;
    res.iterations = it;
    res.relative_residual = r.norm() / bnorm;
    res.history.push_back(res.relative_residual);
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    apply_M_inv(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

LinearOperator identity_operator() {
  return [](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = x; };
}

LinearOperator jacobi_operator(const Eigen::VectorXd& diagonal) {
  Eigen::VectorXd inv = diagonal;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (!(inv[i] > 0.0)) throw SolverError("Jacobi preconditioner needs a positive diagonal");
    inv[i] = 1.0 / inv[i];
  }
  return [inv](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = inv.cwiseProduct(x); };
}

}  // namespace trigrid
