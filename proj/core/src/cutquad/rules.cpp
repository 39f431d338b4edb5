#include "trigrid/cutquad/rules.hpp"

#include <cmath>
#include <numbers>

namespace trigrid {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw Error("Gauss rule needs at least one point");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // Map [-1, 1] to [0, 1]; half the weight.
    r.x[i] = 0.5 * (1.0 - z);
    r.x[n - 1 - i] = 0.5 * (1.0 + z);
    r.w[i] = r.w[n - 1 - i] = 0.5 * w;
  }
  return r;
}

CubeRule tensor_gauss(int n) {
  const Rule1D g = gauss_legendre(n);
  CubeRule r;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        r.x.emplace_back(g.x[i], g.x[j], g.x[k]);
        r.w.push_back(g.w[i] * g.w[j] * g.w[k]);
      }
  return r;
}

TetRule tet_conical_rule(int degree) {
  // x = u, y = (1-u) v, z = (1-u)(1-v) w with Jacobian (1-u)^2 (1-v).
  const int n = std::max(1, (degree + 3 + 1) / 2);
  const Rule1D g = gauss_legendre(n);
  TetRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double u = g.x[i];
        const double v = g.x[j];
        const double w = g.x[k];
        const double x = u;
        const double y = (1.0 - u) * v;
        const double z = (1.0 - u) * (1.0 - v) * w;
        r.bary.push_back({1.0 - x - y - z, x, y, z});
        // Divide by the reference volume 1/6 so weights sum to 1.
        r.w.push_back(6.0 * g.w[i] * g.w[j] * g.w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
  return r;
}

TriangleRule triangle_conical_rule(int degree) {
  const int n = std::max(1, (degree + 2 + 1) / 2);
  const Rule1D g = gauss_legendre(n);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = g.x[i];
      const double v = g.x[j];
      const double x = u;
      const double y = (1.0 - u) * v;
      r.bary.push_back({1.0 - x - y, x, y});
      r.w.push_back(2.0 * g.w[i] * g.w[j] * (1.0 - u));
    }
  return r;
}

TetRule tet_rule(int degree) {
  TetRule r;
  if (degree <= 2) {
    r.degree = 2;
    const double a = 0.1381966011250105;
    const double b = 0.5854101966249685;
    for (int k = 0; k < 4; ++k) {
      std::array<double, 4> l{a, a, a, a};
      l[k] = b;
      r.bary.push_back(l);
      r.w.push_back(0.25);
    }
    return r;
  }
  if (degree <= 5) {
    // 14-point rule with positive weights; weights given on the reference
    // tet of volume 1/6.
    r.degree = 5;
    const double a1 = 0.0927352503108912, w1 = 0.01224884051939366;
    const double a2 = 0.3108859192633006, w2 = 0.01878132095300264;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      for (int k = 0; k < 4; ++k) {
        std::array<double, 4> l{a, a, a, a};
        l[k] = 1.0 - 3.0 * a;
        r.bary.push_back(l);
        r.w.push_back(6.0 * w);
      }
    }
    const double b = 0.0455037041256496, w3 = 0.007091003462846911;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        std::array<double, 4> l{b, b, b, b};
        l[i] = 0.5 - b;
        l[j] = 0.5 - b;
        r.bary.push_back(l);
        r.w.push_back(6.0 * w3);
      }
    return r;
  }
  return tet_conical_rule(degree);
}

TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  if (degree <= 2) {
    r.degree = 2;
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> l{1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
      l[k] = 2.0 / 3.0;
      r.bary.push_back(l);
      r.w.push_back(1.0 / 3.0);
    }
    return r;
  }
  if (degree <= 4) {
    r.degree = 4;
    const double a1 = 0.445948490915965;
    const double w1 = 0.223381589678011;
    const double a2 = 0.091576213509771;
    const double w2 = 0.109951743655322;
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> l{a1, a1, a1};
      l[k] = 1.0 - 2.0 * a1;
      r.bary.push_back(l);
      r.w.push_back(w1);
    }
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> l{a2, a2, a2};
      l[k] = 1.0 - 2.0 * a2;
      r.bary.push_back(l);
      r.w.push_back(w2);
    }
    return r;
  }
  return triangle_conical_rule(degree);
}

}  // namespace trigrid
