#include "trigrid/fem/basis.hpp"

#include "trigrid/cutquad/rules.hpp"

namespace trigrid {

LagrangeBasis::LagrangeBasis(int p) : p_(p) {
  if (p < 1 || p > 2) throw ConfigError("polynomial order must be 1 or 2");
  n_ = (p + 1) * (p + 1) * (p + 1);
  const CubeRule rule = tensor_gauss(p + 1);
  k_ref_ = Eigen::MatrixXd::Zero(n_, n_);
  std::vector<double> v(n_);
  std::vector<Vec3> g(n_);
  for (std::size_t q = 0; q < rule.w.size(); ++q) {
    eval(rule.x[q], v.data(), g.data());
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) k_ref_(a, b) += rule.w[q] * g[a].dot(g[b]);
  }
}

std::array<int, 3> LagrangeBasis::node_ijk(int a) const {
  const int m = p_ + 1;
  return {a % m, (a / m) % m, a / (m * m)};
}

Vec3 LagrangeBasis::node_ref(int a) const {
  const auto ijk = node_ijk(a);
  return Vec3(ijk[0], ijk[1], ijk[2]) / p_;
}

void LagrangeBasis::eval_1d(double t, double* v, double* d) const {
  if (p_ == 1) {
    v[0] = 1.0 - t;
    v[1] = t;
    d[0] = -1.0;
    d[1] = 1.0;
    return;
  }
  // Nodes 0, 1/2, 1.
  v[0] = 2.0 * (t - 0.5) * (t - 1.0);
  v[1] = -4.0 * t * (t - 1.0);
  v[2] = 2.0 * t * (t - 0.5);
  d[0] = 4.0 * t - 3.0;
  d[1] = -8.0 * t + 4.0;
  d[2] = 4.0 * t - 1.0;
}

void LagrangeBasis::eval(const Vec3& xi, double* values, Vec3* gradients) const {
  double v[3][3];
  double d[3][3];
  for (int a = 0; a < 3; ++a) eval_1d(xi[a], v[a], d[a]);
  const int m = p_ + 1;
  int a = 0;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i, ++a) {
        values[a] = v[0][i] * v[1][j] * v[2][k];
        if (gradients) {
          gradients[a] = Vec3(d[0][i] * v[1][j] * v[2][k], v[0][i] * d[1][j] * v[2][k],
                              v[0][i] * v[1][j] * d[2][k]);
        }
      }
}

}  // namespace trigrid
