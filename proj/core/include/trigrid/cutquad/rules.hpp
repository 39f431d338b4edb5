#pragma once

#include "trigrid/common.hpp"

#include <array>
#include <vector>

namespace trigrid {

// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};
Rule1D gauss_legendre(int n);

// Tensor Gauss rule on the unit cube [0,1]^3; weights sum to 1.
struct CubeRule {
  std::vector<Vec3> x;
  std::vector<double> w;
};
CubeRule tensor_gauss(int n);

// Rules on simplices in barycentric coordinates with weights summing to 1
// (multiply by the simplex measure).
struct TetRule {
  std::vector<std::array<double, 4>> bary;
  std::vector<double> w;
  int degree = 0;
};
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
  int degree = 0;
};

// Exact for polynomials of total degree <= `degree`. Degrees 1-2 give the
// 4-point rule, 3-5 a 14-point rule, higher degrees a collapsed
// (Duffy) Gauss product.
TetRule tet_rule(int degree);
// Degrees 1-2: 3-point rule, 3-4: 6-point Dunavant rule, higher: collapsed product.
TriangleRule triangle_rule(int degree);

// Collapsed tensor-product rules, exact to the given degree.
TetRule tet_conical_rule(int degree);
TriangleRule triangle_conical_rule(int degree);

}  // namespace trigrid
