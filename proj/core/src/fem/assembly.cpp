#include "trigrid/fem/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace trigrid {

Assembler::Assembler(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
                     const ConstraintMap& constraints, const CutCellQuadrature& quad,
                     const PoissonData& data, double gamma0, PenaltyMode penalty)
    : grid_(grid), dofs_(dofs), basis_(basis), constraints_(constraints), quad_(quad), data_(data),
      gamma0_(gamma0), penalty_(penalty) {
  if (!(gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
  source_rule_ = tensor_gauss(std::max(1, (quad.degrees().volume + 2) / 2));
}

namespace {

// Largest lambda with v^T Dn v <= lambda v^T K v over v orthogonal to
// constants (both forms vanish on constants).
double trace_inverse_bound(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Dn, double h) {
  const int n = static_cast<int>(K.rows());
  if (Dn.isZero(0.0)) return 0.0;
  const Eigen::MatrixXd Q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Ones(n, 1)).householderQ();
  const Eigen::MatrixXd P = Q.rightCols(n - 1);
  Eigen::MatrixXd Kq = P.transpose() * K * P;
  const Eigen::MatrixXd Dq = P.transpose() * Dn * P;
  Kq = 0.5 * (Kq + Kq.transpose());
  // Floor for leaves whose inside part is (numerically) empty.
  Kq.diagonal().array() += 1e-12 * Kq.cwiseAbs().maxCoeff() + 1e-14 * h;
  const Eigen::LLT<Eigen::MatrixXd> llt(Kq);
  if (llt.info() != Eigen::Success) throw Error("inside stiffness of a cut leaf is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd X = L.triangularView<Eigen::Lower>().solve(Dq);
  const Eigen::MatrixXd Y = L.triangularView<Eigen::Lower>().solve(X.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Y + Y.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

double Assembler::penalty(int leaf) const {
  const double h = grid_.cell_edge(leaf);
  if (penalty_ == PenaltyMode::Fixed || !is_cut(grid_.leaf(leaf).label)) return gamma0_ / h;
  Eigen::MatrixXd K;
  Eigen::VectorXd f;
  // Recomputes the element; only used for reporting and tests.
  const auto pts = quad_.points(leaf);
  const Box3 box = grid_.cell_box(leaf);
  const int n = basis_.size();
  std::vector<double> N(n);
  std::vector<Vec3> G(n);
  K = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Dn = Eigen::MatrixXd::Zero(n, n);
  for (const VolumePoint& p : pts->volume) {
    basis_.eval((p.x - box.lo) / h, N.data(), G.data());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) K(a, b) += p.w * G[a].dot(G[b]) / (h * h);
  }
  for (const SurfacePoint& s : pts->surface) {
    if (data_.is_neumann && data_.is_neumann(s.x)) continue;
    basis_.eval((s.x - box.lo) / h, N.data(), G.data());
    Eigen::VectorXd dn(n);
    for (int a = 0; a < n; ++a) dn[a] = G[a].dot(s.n) / h;
    Dn += s.w * dn * dn.transpose();
  }
  return std::max(gamma0_ / h, 2.0 * trace_inverse_bound(K, Dn, h));
}

void Assembler::local_element(int leaf, Eigen::MatrixXd& K, Eigen::VectorXd& f) const {
  const int n = basis_.size();
  const Box3 box = grid_.cell_box(leaf);
  const double h = grid_.cell_edge(leaf);
  const CellClass label = grid_.leaf(leaf).label;
  f = Eigen::VectorXd::Zero(n);
  std::vector<double> N(n);
  std::vector<Vec3> G(n);

  if (label == CellClass::Active) {
    K = h * basis_.reference_stiffness();
    const double vol = h * h * h;
    for (std::size_t q = 0; q < source_rule_.w.size(); ++q) {
      const Vec3 x = box.lo + h * source_rule_.x[q];
      basis_.eval(source_rule_.x[q], N.data());
      const double fx = data_.f ? data_.f(x) : 0.0;
      for (int a = 0; a < n; ++a) f[a] += source_rule_.w[q] * vol * fx * N[a];
    }
    return;
  }
  if (!is_cut(label)) throw Error("element requested for a leaf without DOFs");

  K = Eigen::MatrixXd::Zero(n, n);
  const auto pts = quad_.points(leaf);
  const double inv_h = 1.0 / h;

  // Stiffness as B * W * B^T in blocks of points.
  constexpr int kChunk = 512;
  Eigen::MatrixXd B(n, 3 * kChunk);
  Eigen::MatrixXd BW(n, 3 * kChunk);
  const auto& vol = pts->volume;
  for (std::size_t start = 0; start < vol.size(); start += kChunk) {
    const int count = static_cast<int>(std::min<std::size_t>(kChunk, vol.size() - start));
    for (int q = 0; q < count; ++q) {
      const VolumePoint& p = vol[start + q];
      basis_.eval((p.x - box.lo) * inv_h, N.data(), G.data());
      const double fx = data_.f ? data_.f(p.x) : 0.0;
      for (int a = 0; a < n; ++a) {
        const Vec3 g = G[a] * inv_h;
        for (int d = 0; d < 3; ++d) {
          B(a, 3 * q + d) = g[d];
          BW(a, 3 * q + d) = p.w * g[d];
        }
        f[a] += p.w * fx * N[a];
      }
      if (!std::isfinite(fx)) throw Error("non-finite source in cell " + std::to_string(leaf));
    }
    K.noalias() += BW.leftCols(3 * count) * B.leftCols(3 * count).transpose();
  }

  // Nitsche terms: gamma M - C - C^T and f += gamma fm - fd.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Dn = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd fm = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd fd = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd Nv(n);
  Eigen::VectorXd dn(n);
  for (const SurfacePoint& s : pts->surface) {
    basis_.eval((s.x - box.lo) * inv_h, N.data(), G.data());
    for (int a = 0; a < n; ++a) {
      Nv[a] = N[a];
      dn[a] = G[a].dot(s.n) * inv_h;
    }
    if (data_.is_neumann && data_.is_neumann(s.x)) {
      const double g = data_.g_neumann ? data_.g_neumann(s.x, s.n) : 0.0;
      f += (s.w * g) * Nv;
      continue;
    }
    const double ub = data_.u_dirichlet ? data_.u_dirichlet(s.x) : 0.0;
    if (!std::isfinite(ub)) throw Error("non-finite boundary data in cell " + std::to_string(leaf));
    M.noalias() += s.w * Nv * Nv.transpose();
    C.noalias() += s.w * Nv * dn.transpose();
    if (penalty_ == PenaltyMode::LocalEigen) Dn.noalias() += s.w * dn * dn.transpose();
    fm += (s.w * ub) * Nv;
    fd += (s.w * ub) * dn;
  }
  double gamma = gamma0_ / h;
  if (penalty_ == PenaltyMode::LocalEigen) gamma = std::max(gamma, 2.0 * trace_inverse_bound(K, Dn, h));
  K += gamma * M - C - C.transpose();
  f += gamma * fm - fd;
  if (!K.allFinite()) throw Error("non-finite element matrix in cell " + std::to_string(leaf));
}

std::vector<int> Assembler::element_dofs(int leaf) const {
  std::vector<int> out;
  for (int node : dofs_.cell_nodes(leaf))
    for (int c : constraints_.cols(node)) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Assembler::element(int leaf, ElementSystem& out) const {
  Eigen::MatrixXd K;
  Eigen::VectorXd f;
  local_element(leaf, K, f);
  out.dofs = element_dofs(leaf);
  const auto nodes = dofs_.cell_nodes(leaf);
  const int n = static_cast<int>(nodes.size());
  const int m = static_cast<int>(out.dofs.size());
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, m);
  for (int a = 0; a < n; ++a) {
    const auto cols = constraints_.cols(nodes[a]);
    const auto vals = constraints_.vals(nodes[a]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = static_cast<int>(std::lower_bound(out.dofs.begin(), out.dofs.end(), cols[k]) -
                                     out.dofs.begin());
      E(a, j) += vals[k];
    }
  }
  out.K.noalias() = E.transpose() * K * E;
  out.f.noalias() = E.transpose() * f;
}

LinearSystem Assembler::assemble() const {
  const auto& cells = dofs_.cells();
  std::vector<std::vector<int>> element_dofs_list(cells.size());
  for (std::size_t e = 0; e < cells.size(); ++e) element_dofs_list[e] = element_dofs(cells[e]);
  LinearSystem sys;
  sys.A = pattern_from_elements(free_count(), element_dofs_list);
  sys.b = Eigen::VectorXd::Zero(free_count());
  ElementSystem el;
  auto& val = sys.A.values();
  const auto& ptr = sys.A.row_ptr();
  const auto& idx = sys.A.col_idx();
  for (int leaf : cells) {
    element(leaf, el);
    const int m = static_cast<int>(el.dofs.size());
    for (int a = 0; a < m; ++a) {
      const int r = el.dofs[a];
      sys.b[r] += el.f[a];
      // Both lists are sorted: merge-walk the row.
      int k = ptr[r];
      for (int b = 0; b < m; ++b) {
        while (idx[k] != el.dofs[b]) ++k;
        val[k] += el.K(a, b);
      }
    }
  }
  return sys;
}

}  // namespace trigrid
