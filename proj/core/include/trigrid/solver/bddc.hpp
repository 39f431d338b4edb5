#pragma once

#include "trigrid/common.hpp"
#include "trigrid/solver/substructure.hpp"

#include <vector>

namespace trigrid {

// Set of interface DOFs shared by the same substructures: a face when two
// substructures share it, an edge (or vertex) when three or more do.
struct Glob {
  std::vector<int> substructures;  // sorted indices into substructures()
  std::vector<int> dofs;           // interface indices
  bool face() const { return substructures.size() == 2; }
};

struct CoarseDof {
  int glob = 0;
  bool corner = false;
  std::vector<int> dofs;  // interface indices: one for a corner, the averaged set otherwise
};

struct BddcOptions {
  int dense_threshold = 3000;
};

// Single-level BDDC preconditioner for the interface Schur complement.
// Every glob contributes its lexicographically smallest and largest DOF
// (by coordinates) as corners and the arithmetic average of its remaining
// DOFs. Local problems fix corners and enforce averages by Lagrange
// multipliers; weights are 1 / multiplicity.
class BddcPreconditioner {
 public:
  BddcPreconditioner(const SubstructuredSystem& system, const std::vector<Vec3>& dof_coordinates,
                     const BddcOptions& options = {});

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

  int coarse_size() const { return static_cast<int>(coarse_.size()); }
  const std::vector<Glob>& globs() const { return globs_; }
  const std::vector<CoarseDof>& coarse_dofs() const { return coarse_; }
  // Coarse DOFs touching substructure s.
  const std::vector<int>& local_coarse(int s) const { return locals_[s].coarse; }
  // C_s Phi_s, which equals the identity by construction.
  Eigen::MatrixXd constraint_times_basis(int s) const;
  const Eigen::MatrixXd& coarse_matrix() const { return S_C_; }

 private:
  struct Local {
    std::vector<int> coarse;          // global coarse ids
    std::vector<int> corner_local;    // local DOF index per local corner
    std::vector<int> corner_slot;     // position in `coarse`
    std::vector<int> average_slot;    // position in `coarse` per average row
    std::vector<int> remaining;       // local DOFs that are not corners
    Eigen::SparseMatrix<double> C_r;  // averages over remaining DOFs
    Eigen::SparseMatrix<double> A_rc;
    SpdSolver A_rr;
    Eigen::MatrixXd AinvCt;           // A_rr^-1 C_r^T
    Eigen::LLT<Eigen::MatrixXd> S_mu;
    Eigen::MatrixXd Phi;              // local full DOFs x local coarse
  };

  // Local saddle solve with zero constraint values; returns the full local vector.
  Eigen::VectorXd local_correction(int s, const Eigen::VectorXd& g) const;

  const SubstructuredSystem& system_;
  std::vector<Glob> globs_;
  std::vector<CoarseDof> coarse_;
  std::vector<Local> locals_;
  Eigen::MatrixXd S_C_;
  Eigen::LLT<Eigen::MatrixXd> coarse_solver_;
};

}  // namespace trigrid
