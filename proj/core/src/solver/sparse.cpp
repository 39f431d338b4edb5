#include "trigrid/solver/sparse.hpp"

#include "trigrid/common.hpp"

#include <algorithm>
#include <cmath>

namespace trigrid {

CsrMatrix::CsrMatrix(int n, std::vector<int> ptr, std::vector<int> idx)
    : n_(n), ptr_(std::move(ptr)), idx_(std::move(idx)), val_(idx_.size(), 0.0) {
  if (static_cast<int>(ptr_.size()) != n + 1) throw Error("row pointer size mismatch");
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& a, double drop) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> ptr{0};
  std::vector<int> idx;
  std::vector<double> val;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (std::abs(a(r, c)) > drop || r == c) {
        idx.push_back(c);
        val.push_back(a(r, c));
      }
    }
    ptr.push_back(static_cast<int>(idx.size()));
  }
  CsrMatrix m(n, std::move(ptr), std::move(idx));
  m.val_ = std::move(val);
  return m;
}

CsrMatrix CsrMatrix::from_eigen(const Eigen::SparseMatrix<double>& a) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> r = a;
  r.makeCompressed();
  const int n = static_cast<int>(r.rows());
  std::vector<int> ptr(r.outerIndexPtr(), r.outerIndexPtr() + n + 1);
  std::vector<int> idx(r.innerIndexPtr(), r.innerIndexPtr() + r.nonZeros());
  CsrMatrix m(n, std::move(ptr), std::move(idx));
  m.val_.assign(r.valuePtr(), r.valuePtr() + r.nonZeros());
  return m;
}

long CsrMatrix::find(int r, int c) const {
  auto b = idx_.begin() + ptr_[r];
  auto e = idx_.begin() + ptr_[r + 1];
  auto it = std::lower_bound(b, e, c);
  if (it == e || *it != c) return -1;
  return static_cast<long>(it - idx_.begin());
}

void CsrMatrix::add(int r, int c, double v) {
  const long k = find(r, c);
  if (k < 0) throw Error("entry outside the sparsity pattern");
  val_[k] += v;
}

double CsrMatrix::value(int r, int c) const {
  const long k = find(r, c);
  return k < 0 ? 0.0 : val_[k];
}

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(n_);
  for (int r = 0; r < n_; ++r) {
    double s = 0.0;
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) s += val_[k] * x[idx_[k]];
    y[r] = s;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  for (int r = 0; r < n_; ++r) d[r] = value(r, r);
  return d;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(idx_.size());
  for (int r = 0; r < n_; ++r)
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) t.emplace_back(r, idx_[k], val_[k]);
  Eigen::SparseMatrix<double> m(n_, n_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) m(r, idx_[k]) += val_[k];
  return m;
}

double CsrMatrix::asymmetry() const {
  double big = 0.0;
  double diff = 0.0;
  for (int r = 0; r < n_; ++r)
    for (int k = ptr_[r]; k < ptr_[r + 1]; ++k) {
      big = std::max(big, std::abs(val_[k]));
      diff = std::max(diff, std::abs(val_[k] - value(idx_[k], r)));
    }
  return big > 0.0 ? diff / big : 0.0;
}

CsrMatrix pattern_from_elements(int n, const std::vector<std::vector<int>>& element_dofs) {
  // DOF -> elements adjacency, then per-row union through a marker array.
  std::vector<int> count(n + 1, 0);
  for (const auto& e : element_dofs)
    for (int d : e) ++count[d + 1];
  for (int i = 0; i < n; ++i) count[i + 1] += count[i];
  std::vector<int> elems(count[n]);
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (std::size_t e = 0; e < element_dofs.size(); ++e)
    for (int d : element_dofs[e]) elems[fill[d]++] = static_cast<int>(e);

  std::vector<int> ptr(n + 1, 0);
  std::vector<int> idx;
  std::vector<int> marker(n, -1);
  std::vector<int> row;
  for (int r = 0; r < n; ++r) {
    row.clear();
    for (int k = count[r]; k < count[r + 1]; ++k) {
      for (int c : element_dofs[elems[k]]) {
        if (marker[c] != r) {
          marker[c] = r;
          row.push_back(c);
        }
      }
    }
    if (marker[r] != r) row.push_back(r);  // keep the diagonal
    std::sort(row.begin(), row.end());
    idx.insert(idx.end(), row.begin(), row.end());
    ptr[r + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(n, std::move(ptr), std::move(idx));
}

}  // namespace trigrid
