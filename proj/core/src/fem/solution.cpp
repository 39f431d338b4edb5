#include "trigrid/fem/solution.hpp"

#include <cmath>

namespace trigrid {

FeSolution::FeSolution(const FeGrid& grid, const DofMap& dofs, const LagrangeBasis& basis,
                       const ConstraintMap& constraints, const Eigen::VectorXd& free_values)
    : grid_(grid), dofs_(dofs), basis_(basis), nodal_(constraints.expand(free_values)) {}

double FeSolution::value_in(int leaf, const Vec3& x, Vec3* grad) const {
  if (!dofs_.has_nodes(leaf)) {
    throw GeometryError("solution evaluated in a leaf without degrees of freedom at " + format_point(x));
  }
  const Box3 box = grid_.cell_box(leaf);
  const double h = grid_.cell_edge(leaf);
  double N[27];
  Vec3 G[27];
  basis_.eval((x - box.lo) / h, N, grad ? G : nullptr);
  const auto nodes = dofs_.cell_nodes(leaf);
  double v = 0.0;
  Vec3 g = Vec3::Zero();
  for (int a = 0; a < basis_.size(); ++a) {
    v += N[a] * nodal_[nodes[a]];
    if (grad) g += G[a] * nodal_[nodes[a]];
  }
  if (grad) *grad = g / h;
  return v;
}

double FeSolution::value(const Vec3& x, Vec3* grad) const {
  return value_in(grid_.locate(x), x, grad);
}

ErrorNorms error_norms(const FeSolution& uh, const FeGrid& grid, const DofMap& dofs,
                       const CutCellQuadrature& quad, const std::function<double(const Vec3&)>& u,
                       const std::function<Vec3(const Vec3&)>& grad_u,
                       std::vector<double>* cell_h1_error_sq) {
  ErrorNorms e;
  if (cell_h1_error_sq) cell_h1_error_sq->assign(grid.size(), 0.0);
  const CubeRule rule = tensor_gauss(std::max(2, (quad.degrees().volume + 4) / 2));
  for (int leaf : dofs.cells()) {
    double h1 = 0.0;
    auto accumulate = [&](const Vec3& x, double w) {
      Vec3 g;
      const double v = uh.value_in(leaf, x, &g);
      const double ue = u(x);
      const Vec3 ge = grad_u(x);
      e.l2_error += w * (v - ue) * (v - ue);
      e.l2_norm += w * v * v;
      h1 += w * (g - ge).squaredNorm();
      e.h1_norm += w * g.squaredNorm();
    };
    if (grid.leaf(leaf).label == CellClass::Active) {
      const Box3 box = grid.cell_box(leaf);
      const double h = grid.cell_edge(leaf);
      for (std::size_t q = 0; q < rule.w.size(); ++q) accumulate(box.lo + h * rule.x[q], rule.w[q] * h * h * h);
    } else {
      const auto pts = quad.points(leaf);
      for (const auto& p : pts->volume) accumulate(p.x, p.w);
    }
    e.h1_error += h1;
    if (cell_h1_error_sq) (*cell_h1_error_sq)[leaf] = h1;
  }
  e.l2_error = std::sqrt(std::max(0.0, e.l2_error));
  e.l2_norm = std::sqrt(std::max(0.0, e.l2_norm));
  e.h1_error = std::sqrt(std::max(0.0, e.h1_error));
  e.h1_norm = std::sqrt(std::max(0.0, e.h1_norm));
  return e;
}

}  // namespace trigrid
