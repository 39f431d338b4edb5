#include "trigrid/solver/bddc.hpp"

#include <algorithm>
#include <map>

namespace trigrid {

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a[0] != b[0]) return a[0] < b[0];
  if (a[1] != b[1]) return a[1] < b[1];
  return a[2] < b[2];
}

}  // namespace

BddcPreconditioner::BddcPreconditioner(const SubstructuredSystem& system,
                                       const std::vector<Vec3>& coords, const BddcOptions& options)
    : system_(system) {
  const auto& subs = system.substructures();
  const int ns = static_cast<int>(subs.size());
  const int nb = system.interface_size();

  // Sharing set of every interface DOF, then globs by identical sets.
  std::vector<std::vector<int>> sharing(nb);
  for (int s = 0; s < ns; ++s)
    for (int g : subs[s].interface_global) sharing[g].push_back(s);
  std::map<std::vector<int>, int> glob_of;
  for (int g = 0; g < nb; ++g) {
    auto [it, inserted] = glob_of.emplace(sharing[g], static_cast<int>(globs_.size()));
    if (inserted) globs_.push_back({sharing[g], {}});
    globs_[it->second].dofs.push_back(g);
  }

  for (int k = 0; k < static_cast<int>(globs_.size()); ++k) {
    auto dofs = globs_[k].dofs;
    auto pos = [&](int g) { return coords[system.interface_dofs()[g]]; };
    const int lo = *std::min_element(dofs.begin(), dofs.end(), [&](int a, int b) { return lex_less(pos(a), pos(b)); });
    const int hi = *std::max_element(dofs.begin(), dofs.end(), [&](int a, int b) { return lex_less(pos(a), pos(b)); });
    coarse_.push_back({k, true, {lo}});
    if (hi != lo) coarse_.push_back({k, true, {hi}});
    std::vector<int> rest;
    for (int g : dofs)
      if (g != lo && g != hi) rest.push_back(g);
    if (!rest.empty()) coarse_.push_back({k, false, rest});
  }

  const int nc = static_cast<int>(coarse_.size());
  locals_.resize(ns);
  S_C_ = Eigen::MatrixXd::Zero(nc, nc);
  std::vector<int> local_of_interface(nb, -1);
  for (int s = 0; s < ns; ++s) {
    const Substructure& sub = subs[s];
    Local& L = locals_[s];
    const int n = static_cast<int>(sub.dofs.size());
    for (std::size_t k = 0; k < sub.interface.size(); ++k) local_of_interface[sub.interface_global[k]] = sub.interface[k];

    std::vector<char> is_corner(n, 0);
    std::vector<std::vector<int>> averages;
    for (int c = 0; c < nc; ++c) {
      const auto& gl = globs_[coarse_[c].glob].substructures;
      if (!std::binary_search(gl.begin(), gl.end(), s)) continue;
      const int slot = static_cast<int>(L.coarse.size());
      L.coarse.push_back(c);
      if (coarse_[c].corner) {
        const int l = local_of_interface[coarse_[c].dofs[0]];
        L.corner_local.push_back(l);
        L.corner_slot.push_back(slot);
        is_corner[l] = 1;
      } else {
        std::vector<int> ls;
        for (int g : coarse_[c].dofs) ls.push_back(local_of_interface[g]);
        averages.push_back(ls);
        L.average_slot.push_back(slot);
      }
    }
    std::vector<int> rpos(n, -1);
    for (int i = 0; i < n; ++i) {
      if (!is_corner[i]) {
        rpos[i] = static_cast<int>(L.remaining.size());
        L.remaining.push_back(i);
      }
    }
    const int nr = static_cast<int>(L.remaining.size());
    const int na = static_cast<int>(averages.size());
    const int ncl = static_cast<int>(L.coarse.size());

    std::vector<Eigen::Triplet<double>> t;
    for (int a = 0; a < na; ++a)
      for (int l : averages[a]) t.emplace_back(a, rpos[l], 1.0 / averages[a].size());
    L.C_r.resize(na, nr);
    L.C_r.setFromTriplets(t.begin(), t.end());

    // A_rr and A_rc from the local matrix.
    std::vector<Eigen::Triplet<double>> trr, trc;
    std::vector<int> cpos(n, -1);
    for (std::size_t k = 0; k < L.corner_local.size(); ++k) cpos[L.corner_local[k]] = static_cast<int>(k);
    for (int k = 0; k < sub.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sub.A, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (rpos[r] < 0) continue;
        if (rpos[c] >= 0) trr.emplace_back(rpos[r], rpos[c], it.value());
        else trc.emplace_back(rpos[r], cpos[c], it.value());
      }
    Eigen::SparseMatrix<double> A_rr(nr, nr);
    A_rr.setFromTriplets(trr.begin(), trr.end());
    L.A_rc.resize(nr, static_cast<Eigen::Index>(L.corner_local.size()));
    L.A_rc.setFromTriplets(trc.begin(), trc.end());
    const std::string where = "subdomain " + std::to_string(sub.subdomain) + " component " +
                              std::to_string(sub.component);
    try {
      L.A_rr.factorize(A_rr, options.dense_threshold);
    } catch (const SolverError&) {
      throw SolverError("singular local saddle problem in " + where +
                        " (missing coarse constraints or undetected fragmentation)");
    }
    if (na > 0) {
      L.AinvCt = L.A_rr.solve(Eigen::MatrixXd(L.C_r.transpose()));
      const Eigen::MatrixXd S = L.C_r * L.AinvCt;
      L.S_mu.compute(S);
      if (L.S_mu.info() != Eigen::Success) throw SolverError("singular multiplier system in " + where);
    }

    // Coarse basis from unit coarse values.
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nr, ncl);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(na, ncl);
    for (std::size_t k = 0; k < L.corner_local.size(); ++k) R.col(L.corner_slot[k]) = -L.A_rc.col(static_cast<Eigen::Index>(k));
    for (int a = 0; a < na; ++a) D(a, L.average_slot[a]) = 1.0;
    Eigen::MatrixXd Wr = L.A_rr.solve(R);
    if (na > 0) {
      const Eigen::MatrixXd M = L.S_mu.solve(L.C_r * Wr - D);
      Wr -= L.AinvCt * M;
    }
    L.Phi = Eigen::MatrixXd::Zero(n, ncl);
    for (int i = 0; i < nr; ++i) L.Phi.row(L.remaining[i]) = Wr.row(i);
    for (std::size_t k = 0; k < L.corner_local.size(); ++k) L.Phi(L.corner_local[k], L.corner_slot[k]) = 1.0;

    const Eigen::MatrixXd local_coarse = L.Phi.transpose() * (sub.A * L.Phi);
    for (int a = 0; a < ncl; ++a)
      for (int b = 0; b < ncl; ++b) S_C_(L.coarse[a], L.coarse[b]) += local_coarse(a, b);
    for (int g : sub.interface_global) local_of_interface[g] = -1;
  }
  if (nc > 0) {
    S_C_ = 0.5 * (S_C_ + S_C_.transpose());
    coarse_solver_.compute(S_C_);
    if (coarse_solver_.info() != Eigen::Success) throw SolverError("coarse problem is singular");
  }
}

Eigen::VectorXd BddcPreconditioner::local_correction(int s, const Eigen::VectorXd& g) const {
  const Local& L = locals_[s];
  const int nr = static_cast<int>(L.remaining.size());
  Eigen::VectorXd gr(nr);
  for (int i = 0; i < nr; ++i) gr[i] = g[L.remaining[i]];
  Eigen::VectorXd wr = L.A_rr.solve(gr);
  if (L.C_r.rows() > 0) {
    const Eigen::VectorXd mu = L.S_mu.solve(L.C_r * wr);
    wr -= L.AinvCt * mu;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < nr; ++i) w[L.remaining[i]] = wr[i];
  return w;
}

void BddcPreconditioner::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  const auto& subs = system_.substructures();
  const auto& mult = system_.multiplicity();
  const int ns = static_cast<int>(subs.size());
  std::vector<Eigen::VectorXd> g(ns);
  Eigen::VectorXd rc = Eigen::VectorXd::Zero(coarse_size());
  for (int s = 0; s < ns; ++s) {
    const Substructure& sub = subs[s];
    g[s] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sub.dofs.size()));
    for (std::size_t k = 0; k < sub.interface.size(); ++k) {
      const int gi = sub.interface_global[k];
      g[s][sub.interface[k]] = r[gi] / mult[gi];
    }
    const Eigen::VectorXd loc = locals_[s].Phi.transpose() * g[s];
    for (std::size_t a = 0; a < locals_[s].coarse.size(); ++a) rc[locals_[s].coarse[a]] += loc[a];
  }
  const Eigen::VectorXd uc = coarse_size() > 0 ? Eigen::VectorXd(coarse_solver_.solve(rc)) : Eigen::VectorXd();
  z = Eigen::VectorXd::Zero(r.size());
  for (int s = 0; s < ns; ++s) {
    const Substructure& sub = subs[s];
    const Local& L = locals_[s];
    Eigen::VectorXd w = local_correction(s, g[s]);
    if (!L.coarse.empty()) {
      Eigen::VectorXd ul(L.coarse.size());
      for (std::size_t a = 0; a < L.coarse.size(); ++a) ul[a] = uc[L.coarse[a]];
      w += L.Phi * ul;
    }
    for (std::size_t k = 0; k < sub.interface.size(); ++k) {
      const int gi = sub.interface_global[k];
      z[gi] += w[sub.interface[k]] / mult[gi];
    }
  }
}

Eigen::MatrixXd BddcPreconditioner::constraint_times_basis(int s) const {
  const Local& L = locals_[s];
  const int ncl = static_cast<int>(L.coarse.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ncl, ncl);
  for (std::size_t k = 0; k < L.corner_local.size(); ++k) out.row(L.corner_slot[k]) = L.Phi.row(L.corner_local[k]);
  if (L.C_r.rows() > 0) {
    Eigen::MatrixXd Phir(L.remaining.size(), ncl);
    for (std::size_t i = 0; i < L.remaining.size(); ++i) Phir.row(i) = L.Phi.row(L.remaining[i]);
    const Eigen::MatrixXd cr = L.C_r * Phir;
    for (int a = 0; a < cr.rows(); ++a) out.row(L.average_slot[a]) = cr.row(a);
  }
  return out;
}

}  // namespace trigrid
