#pragma once

#include "trigrid/solver/sparse.hpp"

#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <vector>

namespace trigrid {

// Cholesky factorization of an SPD matrix, dense below a size threshold and
// sparse (simplicial, AMD ordering) above.
class SpdSolver {
 public:
  void factorize(const Eigen::SparseMatrix<double>& A, int dense_threshold);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
  int size() const { return n_; }
  bool dense() const { return dense_; }

 private:
  int n_ = 0;
  bool dense_ = true;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> sparse_;
};

// One non-overlapping piece of the element set: the elements of one
// subdomain's dual-graph component.
struct Substructure {
  int subdomain = 0;
  int component = 0;
  std::vector<int> dofs;               // global free DOFs, sorted
  std::vector<int> interior;           // local indices
  std::vector<int> interface;          // local indices
  std::vector<int> interface_global;   // global interface index per interface DOF
  Eigen::SparseMatrix<double> A;       // subassembled local matrix
  Eigen::VectorXd f;                   // subassembled local load
  Eigen::SparseMatrix<double> A_II, A_IB, A_BB;
  SpdSolver interior_solver;
};

struct SubstructureOptions {
  int dense_threshold = 3000;
  int min_shared_dofs = 4;  // dual-graph edge rule
};

// Element stream: element e's free DOFs (sorted) with its matrix and load.
struct ElementBlock {
  std::vector<int> dofs;
  Eigen::MatrixXd K;
  Eigen::VectorXd f;
};

// Substructure index per element: connected components, within each
// subdomain, of the graph joining elements that share at least
// `min_shared` DOFs. Elements without DOFs get -1. `component_of` receives
// the component label within the subdomain. `linked`, when given, lists
// per element further elements to join whenever they share the subdomain
// (symmetric).
std::vector<int> substructure_ids(const std::vector<std::vector<int>>& element_dofs,
                                  const std::vector<int>& element_subdomain, int min_shared,
                                  std::vector<int>* component_of = nullptr,
                                  int* substructure_count = nullptr,
                                  const std::vector<std::vector<int>>* linked = nullptr);

// Iterative substructuring on the interface Schur complement. The interface
// holds the DOFs shared by two or more substructures.
class SubstructuredSystem {
 public:
  // `element(e, block)` fills the contribution of element e.
  SubstructuredSystem(int n_free, int n_elements,
                      const std::function<void(int, ElementBlock&)>& element,
                      const std::vector<int>& element_substructure,
                      const std::vector<int>& substructure_subdomain,
                      const std::vector<int>& substructure_component,
                      const SubstructureOptions& options = {});

  int free_count() const { return n_free_; }
  int interface_size() const { return static_cast<int>(interface_dofs_.size()); }
  const std::vector<int>& interface_dofs() const { return interface_dofs_; }
  const std::vector<int>& multiplicity() const { return multiplicity_; }
  const std::vector<Substructure>& substructures() const { return subs_; }
  int dropped() const { return dropped_; }

  // y = S x with S = sum_i R_i^T (A_BB - A_BI A_II^-1 A_IB) R_i, matrix-free.
  void schur_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  // h = f_B - sum_i R_i^T A_BI A_II^-1 f_I.
  Eigen::VectorXd schur_rhs() const;
  // Full free vector from interface values.
  Eigen::VectorXd recover(const Eigen::VectorXd& u_interface) const;
  // Sum_i R_i^T A_i R_i as a global matrix (for checks).
  Eigen::SparseMatrix<double> assembled_matrix() const;
  Eigen::VectorXd assembled_load() const;

 private:
  int n_free_;
  int dropped_ = 0;
  std::vector<Substructure> subs_;
  std::vector<int> interface_dofs_;  // global free DOF per interface index
  std::vector<int> multiplicity_;    // per interface index
};

}  // namespace trigrid
