#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace trigrid {

// Square compressed-row matrix with a fixed sparsity pattern; column
// indices are sorted within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int n, std::vector<int> ptr, std::vector<int> idx);

  static CsrMatrix from_dense(const Eigen::MatrixXd& a, double drop = 0.0);
  static CsrMatrix from_eigen(const Eigen::SparseMatrix<double>& a);

  int rows() const { return n_; }
  std::size_t nnz() const { return idx_.size(); }

  // Adds v at (r, c); the entry must exist in the pattern.
  void add(int r, int c, double v);
  // Position of (r, c) in the value array, or -1.
  long find(int r, int c) const;
  double value(int r, int c) const;

  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::VectorXd diagonal() const;

  Eigen::SparseMatrix<double> to_eigen() const;
  Eigen::MatrixXd to_dense() const;
  // Max |a_ij - a_ji| relative to max |a_ij|.
  double asymmetry() const;

  const std::vector<int>& row_ptr() const { return ptr_; }
  const std::vector<int>& col_idx() const { return idx_; }
  std::vector<double>& values() { return val_; }
  const std::vector<double>& values() const { return val_; }

 private:
  int n_ = 0;
  std::vector<int> ptr_{0};
  std::vector<int> idx_;
  std::vector<double> val_;
};

// Symmetric pattern from per-element DOF lists (each sorted and unique).
CsrMatrix pattern_from_elements(int n, const std::vector<std::vector<int>>& element_dofs);

}  // namespace trigrid
