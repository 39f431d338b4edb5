#include "trigrid/solver/substructure.hpp"

#include "trigrid/common.hpp"
#include "trigrid/log.hpp"

#include <algorithm>
#include <map>

namespace trigrid {

void SpdSolver::factorize(const Eigen::SparseMatrix<double>& A, int dense_threshold) {
  n_ = static_cast<int>(A.rows());
  dense_ = n_ < dense_threshold;
  if (n_ == 0) return;
  if (dense_) {
    llt_.compute(Eigen::MatrixXd(A));
    if (llt_.info() != Eigen::Success) throw SolverError("dense Cholesky failed (matrix not SPD)");
  } else {
    sparse_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    sparse_->compute(A);
    if (sparse_->info() != Eigen::Success) throw SolverError("sparse Cholesky failed (matrix not SPD)");
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (n_ == 0) return Eigen::VectorXd();
  return dense_ ? Eigen::VectorXd(llt_.solve(b)) : Eigen::VectorXd(sparse_->solve(b));
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& B) const {
  if (n_ == 0) return Eigen::MatrixXd(0, B.cols());
  return dense_ ? Eigen::MatrixXd(llt_.solve(B)) : Eigen::MatrixXd(sparse_->solve(B));
}

namespace {

Eigen::SparseMatrix<double> extract(const Eigen::SparseMatrix<double>& A, const std::vector<int>& rows,
                                    const std::vector<int>& cols) {
  std::vector<int> rmap(A.rows(), -1);
  std::vector<int> cmap(A.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) cmap[cols[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      if (rmap[it.row()] >= 0 && cmap[it.col()] >= 0) t.emplace_back(rmap[it.row()], cmap[it.col()], it.value());
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

std::vector<int> substructure_ids(const std::vector<std::vector<int>>& element_dofs,
                                  const std::vector<int>& element_subdomain, int min_shared,
                                  std::vector<int>* component_of, int* substructure_count,
                                  const std::vector<std::vector<int>>* linked) {
  const int ne = static_cast<int>(element_dofs.size());
  int n_dofs = 0;
  for (const auto& d : element_dofs)
    for (int x : d) n_dofs = std::max(n_dofs, x + 1);
  std::vector<std::vector<int>> dof_elems(n_dofs);
  for (int e = 0; e < ne; ++e)
    for (int d : element_dofs[e]) dof_elems[d].push_back(e);

  std::vector<int> comp(ne, -1);
  std::vector<int> ids(ne, -1);
  std::map<int, int> next_component;  // per subdomain
  std::vector<int> shared(ne, 0);
  std::vector<int> touched;
  std::vector<int> stack;
  int count = 0;
  for (int seed = 0; seed < ne; ++seed) {
    if (ids[seed] >= 0 || element_dofs[seed].empty()) continue;
    const int s = element_subdomain[seed];
    const int label = next_component[s]++;
    const int id = count++;
    ids[seed] = id;
    comp[seed] = label;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      touched.clear();
      for (int d : element_dofs[e]) {
        for (int o : dof_elems[d]) {
          if (o == e || element_subdomain[o] != s) continue;
          if (shared[o]++ == 0) touched.push_back(o);
        }
      }
      if (linked) {
        for (int o : (*linked)[e]) {
          if (ids[o] < 0 && element_subdomain[o] == s && !element_dofs[o].empty()) {
            ids[o] = id;
            comp[o] = label;
            stack.push_back(o);
          }
        }
      }
      for (int o : touched) {
        if (shared[o] >= min_shared && ids[o] < 0) {
          ids[o] = id;
          comp[o] = label;
          stack.push_back(o);
        }
        shared[o] = 0;
      }
    }
  }
  if (component_of) *component_of = comp;
  if (substructure_count) *substructure_count = count;
  return ids;
}

SubstructuredSystem::SubstructuredSystem(int n_free, int n_elements,
                                         const std::function<void(int, ElementBlock&)>& element,
                                         const std::vector<int>& element_substructure,
                                         const std::vector<int>& substructure_subdomain,
                                         const std::vector<int>& substructure_component,
                                         const SubstructureOptions& options)
    : n_free_(n_free) {
  const int ns = static_cast<int>(substructure_subdomain.size());
  std::vector<std::vector<Eigen::Triplet<double>>> triplets(ns);
  std::vector<std::map<int, double>> loads(ns);
  std::vector<std::vector<int>> dofs(ns);
  ElementBlock block;
  for (int e = 0; e < n_elements; ++e) {
    const int s = element_substructure[e];
    if (s < 0) continue;
    element(e, block);
    const int m = static_cast<int>(block.dofs.size());
    for (int a = 0; a < m; ++a) {
      dofs[s].push_back(block.dofs[a]);
      loads[s][block.dofs[a]] += block.f[a];
      for (int b = 0; b < m; ++b) triplets[s].emplace_back(block.dofs[a], block.dofs[b], block.K(a, b));
    }
  }

  std::vector<int> mult(n_free, 0);
  std::vector<int> sub_index(ns, -1);
  for (int s = 0; s < ns; ++s) {
    auto& d = dofs[s];
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (d.empty()) {
      ++dropped_;
      log_warning("substructure " + std::to_string(s) + " has no degrees of freedom; dropped");
      continue;
    }
    for (int x : d) ++mult[x];
    sub_index[s] = static_cast<int>(subs_.size());
    Substructure sub;
    sub.subdomain = substructure_subdomain[s];
    sub.component = substructure_component[s];
    sub.dofs = d;
    subs_.push_back(std::move(sub));
  }

  std::vector<int> interface_index(n_free, -1);
  for (int x = 0; x < n_free; ++x) {
    if (mult[x] >= 2) {
      interface_index[x] = static_cast<int>(interface_dofs_.size());
      interface_dofs_.push_back(x);
      multiplicity_.push_back(mult[x]);
    }
  }

  std::vector<int> local(n_free, -1);
  for (int s = 0; s < ns; ++s) {
    if (sub_index[s] < 0) continue;
    Substructure& sub = subs_[sub_index[s]];
    const int n = static_cast<int>(sub.dofs.size());
    for (int i = 0; i < n; ++i) local[sub.dofs[i]] = i;
    for (auto& t : triplets[s]) t = Eigen::Triplet<double>(local[t.row()], local[t.col()], t.value());
    sub.A.resize(n, n);
    sub.A.setFromTriplets(triplets[s].begin(), triplets[s].end());
    triplets[s].clear();
    triplets[s].shrink_to_fit();
    sub.f = Eigen::VectorXd::Zero(n);
    for (const auto& [g, v] : loads[s]) sub.f[local[g]] = v;
    for (int i = 0; i < n; ++i) {
      const int g = sub.dofs[i];
      if (interface_index[g] >= 0) {
        sub.interface.push_back(i);
        sub.interface_global.push_back(interface_index[g]);
      } else {
        sub.interior.push_back(i);
      }
    }
    sub.A_II = extract(sub.A, sub.interior, sub.interior);
    sub.A_IB = extract(sub.A, sub.interior, sub.interface);
    sub.A_BB = extract(sub.A, sub.interface, sub.interface);
    try {
      sub.interior_solver.factorize(sub.A_II, options.dense_threshold);
    } catch (const SolverError& e) {
      throw SolverError("interior solve of subdomain " + std::to_string(sub.subdomain) + " (component " +
                        std::to_string(sub.component) + "): " + e.what());
    }
    for (int i = 0; i < n; ++i) local[sub.dofs[i]] = -1;
  }
}

void SubstructuredSystem::schur_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y = Eigen::VectorXd::Zero(interface_size());
  Eigen::VectorXd xb;
  for (const auto& sub : subs_) {
    const int nb = static_cast<int>(sub.interface.size());
    if (nb == 0) continue;
    xb.resize(nb);
    for (int k = 0; k < nb; ++k) xb[k] = x[sub.interface_global[k]];
    Eigen::VectorXd yb = sub.A_BB * xb;
    if (!sub.interior.empty()) {
      const Eigen::VectorXd t = sub.interior_solver.solve(Eigen::VectorXd(sub.A_IB * xb));
      yb -= sub.A_IB.transpose() * t;
    }
    for (int k = 0; k < nb; ++k) y[sub.interface_global[k]] += yb[k];
  }
}

Eigen::VectorXd SubstructuredSystem::schur_rhs() const {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(interface_size());
  for (const auto& sub : subs_) {
    const int nb = static_cast<int>(sub.interface.size());
    if (nb == 0) continue;
    Eigen::VectorXd hb(nb);
    for (int k = 0; k < nb; ++k) hb[k] = sub.f[sub.interface[k]];
    if (!sub.interior.empty()) {
      Eigen::VectorXd fi(sub.interior.size());
      for (std::size_t k = 0; k < sub.interior.size(); ++k) fi[k] = sub.f[sub.interior[k]];
      hb -= sub.A_IB.transpose() * sub.interior_solver.solve(fi);
    }
    for (int k = 0; k < nb; ++k) h[sub.interface_global[k]] += hb[k];
  }
  return h;
}

Eigen::VectorXd SubstructuredSystem::recover(const Eigen::VectorXd& u_interface) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_free_);
  for (std::size_t k = 0; k < interface_dofs_.size(); ++k) u[interface_dofs_[k]] = u_interface[k];
  for (const auto& sub : subs_) {
    if (sub.interior.empty()) continue;
    Eigen::VectorXd rhs(sub.interior.size());
    for (std::size_t k = 0; k < sub.interior.size(); ++k) rhs[k] = sub.f[sub.interior[k]];
    if (!sub.interface.empty()) {
      Eigen::VectorXd ub(sub.interface.size());
      for (std::size_t k = 0; k < sub.interface.size(); ++k) ub[k] = u_interface[sub.interface_global[k]];
      rhs -= sub.A_IB * ub;
    }
    const Eigen::VectorXd ui = sub.interior_solver.solve(rhs);
    for (std::size_t k = 0; k < sub.interior.size(); ++k) u[sub.dofs[sub.interior[k]]] = ui[k];
  }
  return u;
}

Eigen::SparseMatrix<double> SubstructuredSystem::assembled_matrix() const {
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& sub : subs_)
    for (int k = 0; k < sub.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sub.A, k); it; ++it)
        t.emplace_back(sub.dofs[it.row()], sub.dofs[it.col()], it.value());
  Eigen::SparseMatrix<double> A(n_free_, n_free_);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

Eigen::VectorXd SubstructuredSystem::assembled_load() const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_free_);
  for (const auto& sub : subs_)
    for (std::size_t i = 0; i < sub.dofs.size(); ++i) f[sub.dofs[i]] += sub.f[i];
  return f;
}

}  // namespace trigrid
