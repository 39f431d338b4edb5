#include "trigrid/cutquad/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace trigrid {

double Tet::volume() const {
  return (v[1] - v[0]).cross(v[2] - v[0]).dot(v[3] - v[0]) / 6.0;
}

double CellDecomposition::inside_volume() const {
  double s = 0.0;
  for (const auto& c : cells) s += c.box.extent().prod();
  for (const auto& t : tets) s += t.volume();
  return s;
}

double CellDecomposition::surface_area() const {
  double s = 0.0;
  for (const auto& t : triangles) s += t.area;
  return s;
}

std::vector<QuadCell> build_quadrature_grid(const Box3& cell, const ImplicitField& phi, int r_q,
                                            std::vector<double>* corner_values) {
  if (r_q < 0 || r_q > 6) throw ConfigError("quadrature sub-levels must lie in [0, 6]");
  const int n = 1 << r_q;
  const int m = n + 1;
  const Vec3 step = cell.extent() / n;
  std::vector<double> local;
  std::vector<double>& vals = corner_values ? *corner_values : local;
  vals.resize(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const Vec3 x(i == n ? cell.hi[0] : cell.lo[0] + i * step[0],
                     j == n ? cell.hi[1] : cell.lo[1] + j * step[1],
                     k == n ? cell.hi[2] : cell.lo[2] + k * step[2]);
        vals[(static_cast<std::size_t>(k) * m + j) * m + i] = phi.value(x);
      }

  // cls[l] holds, per node at sub-level l, its class if uniform, else Cut
  // with merged[l] = 0 marking a node that must be descended.
  std::vector<std::vector<QuadClass>> cls(r_q + 1);
  std::vector<std::vector<char>> uniform(r_q + 1);
  for (int l = r_q; l >= 0; --l) {
    const int nl = 1 << l;
    cls[l].resize(static_cast<std::size_t>(nl) * nl * nl);
    uniform[l].resize(cls[l].size());
    for (int k = 0; k < nl; ++k)
      for (int j = 0; j < nl; ++j)
        for (int i = 0; i < nl; ++i) {
          const std::size_t id = (static_cast<std::size_t>(k) * nl + j) * nl + i;
          if (l == r_q) {
            bool pos = false;
            bool neg = false;
            for (int c = 0; c < 8; ++c) {
              const double v = vals[(static_cast<std::size_t>(k + (c >> 2 & 1)) * m + j +
                                     (c >> 1 & 1)) * m + i + (c & 1)];
              (v >= 0.0 ? pos : neg) = true;
            }
            cls[l][id] = pos && neg ? QuadClass::Cut : (pos ? QuadClass::Active : QuadClass::Inactive);
            uniform[l][id] = cls[l][id] != QuadClass::Cut;
            continue;
          }
          const int nc = nl * 2;
          QuadClass first = QuadClass::Cut;
          bool same = true;
          for (int c = 0; c < 8 && same; ++c) {
            const std::size_t cid = (static_cast<std::size_t>(2 * k + (c >> 2 & 1)) * nc +
                                     2 * j + (c >> 1 & 1)) * nc + 2 * i + (c & 1);
            if (!uniform[l + 1][cid]) same = false;
            if (c == 0) first = cls[l + 1][cid];
            else if (cls[l + 1][cid] != first) same = false;
          }
          uniform[l][id] = same;
          cls[l][id] = same ? first : QuadClass::Cut;
        }
  }

  std::vector<QuadCell> out;
  struct Item {
    int l, i, j, k;
  };
  std::vector<Item> stack{{0, 0, 0, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const int nl = 1 << it.l;
    const std::size_t id = (static_cast<std::size_t>(it.k) * nl + it.j) * nl + it.i;
    if (uniform[it.l][id] || it.l == r_q) {
      const int span = 1 << (r_q - it.l);
      QuadCell q;
      q.level = it.l;
      q.cls = cls[it.l][id];
      const int i0 = it.i * span, j0 = it.j * span, k0 = it.k * span;
      auto coord = [&](int a, int idx) { return idx == n ? cell.hi[a] : cell.lo[a] + idx * step[a]; };
      q.box.lo = Vec3(coord(0, i0), coord(1, j0), coord(2, k0));
      q.box.hi = Vec3(coord(0, i0 + span), coord(1, j0 + span), coord(2, k0 + span));
      out.push_back(q);
      continue;
    }
    for (int c = 7; c >= 0; --c) {
      stack.push_back({it.l + 1, 2 * it.i + (c & 1), 2 * it.j + (c >> 1 & 1), 2 * it.k + (c >> 2 & 1)});
    }
  }
  return out;
}

std::array<std::array<int, 4>, 6> six_tet_corners(int pattern, int mirror) {
  static constexpr int kStart[3] = {0, 1, 2};
  const int a = kStart[pattern];
  static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::array<std::array<int, 4>, 6> out;
  for (int t = 0; t < 6; ++t) {
    const int c0 = a;
    const int c1 = c0 ^ (1 << kPerm[t][0]);
    const int c2 = c1 ^ (1 << kPerm[t][1]);
    const int c3 = a ^ 7;
    out[t] = {c0 ^ mirror, c1 ^ mirror, c2 ^ mirror, c3 ^ mirror};
  }
  return out;
}

namespace {

Vec3 hex_corner(const Box3& b, int k) {
  return Vec3(k & 1 ? b.hi[0] : b.lo[0], k & 2 ? b.hi[1] : b.lo[1], k & 4 ? b.hi[2] : b.lo[2]);
}

void orient(Tet& t, std::array<int, 4>* ids = nullptr) {
  if (t.volume() < 0.0) {
    std::swap(t.v[2], t.v[3]);
    if (ids) std::swap((*ids)[2], (*ids)[3]);
  }
}

}  // namespace

std::array<Tet, 6> split_hex_six_tets(const Box3& box, int pattern, int mirror) {
  const auto corners = six_tet_corners(pattern, mirror);
  std::array<Tet, 6> out;
  for (int t = 0; t < 6; ++t) {
    for (int k = 0; k < 4; ++k) out[t].v[k] = hex_corner(box, corners[t][k]);
    orient(out[t]);
  }
  return out;
}

int count_mixed_tets(const std::array<double, 8>& phi, int pattern, int mirror) {
  int mixed = 0;
  for (const auto& t : six_tet_corners(pattern, mirror)) {
    int inside = 0;
    for (int k : t) inside += phi[k] >= 0.0;
    if (inside != 0 && inside != 4) ++mixed;
  }
  return mixed;
}

int choose_split_pattern(const std::array<double, 8>& phi, int mirror) {
  int best = 0;
  int best_count = count_mixed_tets(phi, 0, mirror);
  for (int p = 1; p < 3; ++p) {
    const int c = count_mixed_tets(phi, p, mirror);
    if (c < best_count) {
      best = p;
      best_count = c;
    }
  }
  return best;
}

Vec3 edge_root_bisection(const Vec3& a_in, const Vec3& b_in, const ImplicitField& phi, double tol,
                         int max_iter) {
  Vec3 a = a_in;
  Vec3 b = b_in;
  double fa = phi.value(a);
  double fb = phi.value(b);
  const bool ina = fa >= 0.0;
  if (ina == (fb >= 0.0)) {
    throw GeometryError("edge root requested on an edge without sign change: " + format_point(a) +
                        " to " + format_point(b));
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  int it = 0;
  while ((b - a).norm() > tol) {
    if (it++ >= max_iter) {
      throw GeometryError("bisection did not converge on edge " + format_point(a_in) + " to " +
                          format_point(b_in));
    }
    const Vec3 mid = 0.5 * (a + b);
    const double fm = phi.value(mid);
    if ((fm >= 0.0) == ina) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  const double t = fa / (fa - fb);
  return a + t * (b - a);
}

void marching_tetrahedra(const Tet& tet, const std::array<double, 4>& phi,
                         const std::function<Vec3(int, int)>& root, std::vector<Tet>& inside,
                         std::vector<BoundaryTriangle>* triangles, bool outside,
                         double min_volume) {
  int in[4];
  int out[4];
  int nin = 0;
  int nout = 0;
  for (int k = 0; k < 4; ++k) {
    const bool is_in = outside ? phi[k] < 0.0 : phi[k] >= 0.0;
    (is_in ? in[nin++] : out[nout++]) = k;
  }
  if (nin == 0) return;
  const double min_area = std::pow(std::max(min_volume, 0.0), 2.0 / 3.0);

  auto add_tet = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    Tet t{{a, b, c, d}};
    orient(t);
    if (t.volume() > min_volume) inside.push_back(t);
  };
  // Triangle oriented away from the tet's region-side vertices, i.e. toward
  // the excluded vertex `away`.
  auto add_tri = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& away) {
    if (!triangles) return;
    BoundaryTriangle t{{a, b, c}, Vec3::Zero(), 0.0};
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    if (len <= 2.0 * min_area || len == 0.0) return;
    n /= len;
    if (n.dot(away - a) < 0.0) {
      n = -n;
      std::swap(t.v[1], t.v[2]);
    }
    t.normal = n;
    t.area = 0.5 * len;
    triangles->push_back(t);
  };
  // Prism with bottom (p0, p1, p2) and top (q0, q1, q2) joined by edges pi-qi.
  auto add_prism = [&](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0,
                       const Vec3& q1, const Vec3& q2) {
    add_tet(p0, p1, p2, q0);
    add_tet(p1, p2, q0, q1);
    add_tet(p2, q0, q1, q2);
  };

  const auto& V = tet.v;
  if (nin == 4) {
    add_tet(V[0], V[1], V[2], V[3]);
    return;
  }
  if (nin == 1) {
    const int a = in[0];
    const Vec3 r0 = root(a, out[0]);
    const Vec3 r1 = root(a, out[1]);
    const Vec3 r2 = root(a, out[2]);
    add_tet(V[a], r0, r1, r2);
    add_tri(r0, r1, r2, V[out[0]]);
    return;
  }
  if (nin == 3) {
    const int d = out[0];
    const Vec3 r0 = root(in[0], d);
    const Vec3 r1 = root(in[1], d);
    const Vec3 r2 = root(in[2], d);
    add_prism(V[in[0]], V[in[1]], V[in[2]], r0, r1, r2);
    add_tri(r0, r1, r2, V[d]);
    return;
  }
  // Two inside (a, b), two outside (c, d).
  const int a = in[0], b = in[1], c = out[0], d = out[1];
  const Vec3 rac = root(a, c);
  const Vec3 rad = root(a, d);
  const Vec3 rbc = root(b, c);
  const Vec3 rbd = root(b, d);
  add_prism(V[a], rac, rad, V[b], rbc, rbd);
  // The prism's quad face (rac, rad, rbd, rbc) is split along rad-rbc.
  const Vec3 away = 0.5 * (V[c] + V[d]);
  add_tri(rac, rad, rbc, away);
  add_tri(rad, rbd, rbc, away);
}

CellDecomposition decompose_cell(const Box3& cell, const ImplicitField& phi,
                                 const CutQuadOptions& options, bool outside) {
  CellDecomposition dec;
  std::vector<double> vals;
  const auto leaves = build_quadrature_grid(cell, phi, options.r_q, &vals);
  const int n = 1 << options.r_q;
  const int m = n + 1;
  const Vec3 step = cell.extent() / n;
  const double h_q = step.maxCoeff();
  const double min_volume = 1e-12 * h_q * h_q * h_q;
  const QuadClass keep = outside ? QuadClass::Inactive : QuadClass::Active;

  // Roots keyed by the lattice-node pair, so edges shared by tets and leaves
  // of this cell get a single intersection point.
  std::unordered_map<std::uint64_t, Vec3> roots;
  auto node_point = [&](int i, int j, int k) {
    return Vec3(i == n ? cell.hi[0] : cell.lo[0] + i * step[0],
                j == n ? cell.hi[1] : cell.lo[1] + j * step[1],
                k == n ? cell.hi[2] : cell.lo[2] + k * step[2]);
  };

  for (const QuadCell& q : leaves) {
    if (q.cls == keep) {
      dec.cells.push_back(q);
      continue;
    }
    if (q.cls != QuadClass::Cut) continue;
    dec.cut_leaf_volume += q.box.extent().prod();
    int li[3];
    for (int a = 0; a < 3; ++a) li[a] = static_cast<int>(std::lround((q.box.lo[a] - cell.lo[a]) / step[a]));
    int mirror = 0;
    for (int a = 0; a < 3; ++a) {
      const long long g = std::llround((q.box.lo[a] - options.lattice_origin[a]) / step[a]);
      if (g & 1) mirror |= 1 << a;
    }
    std::array<double, 8> cphi;
    std::array<int, 8> cid;
    for (int c = 0; c < 8; ++c) {
      cid[c] = ((li[2] + (c >> 2 & 1)) * m + li[1] + (c >> 1 & 1)) * m + li[0] + (c & 1);
      cphi[c] = vals[cid[c]];
    }
    const int pattern = options.policy == SplitPolicy::Consistent ? 0 : choose_split_pattern(cphi, mirror);
    for (auto corners : six_tet_corners(pattern, mirror)) {
      Tet t;
      for (int k = 0; k < 4; ++k) {
        const int c = corners[k];
        t.v[k] = node_point(li[0] + (c & 1), li[1] + (c >> 1 & 1), li[2] + (c >> 2 & 1));
      }
      orient(t, &corners);
      std::array<double, 4> tphi;
      for (int k = 0; k < 4; ++k) tphi[k] = cphi[corners[k]];
      auto root = [&](int i, int j) -> Vec3 {
        int ga = cid[corners[i]];
        int gb = cid[corners[j]];
        Vec3 pa = t.v[i];
        Vec3 pb = t.v[j];
        if (ga > gb) {
          std::swap(ga, gb);
          std::swap(pa, pb);
        }
        const std::uint64_t key = static_cast<std::uint64_t>(ga) << 32 | static_cast<std::uint32_t>(gb);
        auto it = roots.find(key);
        if (it != roots.end()) return it->second;
        double tol = options.root_tol;
        if (tol <= 0.0) tol = phi.resolution() > 0.0 ? phi.resolution() / 100.0 : 1e-10 * (pb - pa).norm();
        const Vec3 r = edge_root_bisection(pa, pb, phi, tol, options.max_bisection);
        roots.emplace(key, r);
        return r;
      };
      marching_tetrahedra(t, tphi, root, dec.tets, &dec.triangles, outside, min_volume);
    }
  }
  return dec;
}

void emit_quadrature(const CellDecomposition& dec, const QuadratureDegrees& degrees,
                     std::vector<VolumePoint>& volume, std::vector<SurfacePoint>* surface) {
  const CubeRule box = tensor_gauss(std::max(1, (degrees.volume + 2) / 2));
  const TetRule tr = tet_rule(degrees.volume);
  for (const auto& c : dec.cells) {
    const Vec3 e = c.box.extent();
    const double vol = e.prod();
    for (std::size_t g = 0; g < box.x.size(); ++g) {
      volume.push_back({c.box.lo + e.cwiseProduct(box.x[g]), box.w[g] * vol});
    }
  }
  for (const auto& t : dec.tets) {
    const double vol = t.volume();
    for (std::size_t g = 0; g < tr.w.size(); ++g) {
      const auto& l = tr.bary[g];
      volume.push_back({l[0] * t.v[0] + l[1] * t.v[1] + l[2] * t.v[2] + l[3] * t.v[3], tr.w[g] * vol});
    }
  }
  if (!surface) return;
  const TriangleRule sr = triangle_rule(degrees.surface);
  for (const auto& t : dec.triangles) {
    for (std::size_t g = 0; g < sr.w.size(); ++g) {
      const auto& l = sr.bary[g];
      surface->push_back({l[0] * t.v[0] + l[1] * t.v[1] + l[2] * t.v[2], sr.w[g] * t.area, t.normal});
    }
  }
}

}  // namespace trigrid
