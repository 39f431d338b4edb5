#include "trigrid/sdf/distance_grid.hpp"

#include "trigrid/sdf/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trigrid {

namespace {

constexpr int kB = SparseDistanceGrid::kBlock;
constexpr int kBlockSize = kB * kB * kB;

std::uint64_t mix(std::int64_t key) {
  return static_cast<std::uint64_t>(key) * 0x9E3779B97F4A7C15ull;
}

}  // namespace

SparseDistanceGrid::SparseDistanceGrid(const Box3& domain, double h, int band_factor)
    : h_(h), delta_(band_factor * h) {
  if (!(h > 0.0)) throw ConfigError("geometry grid spacing must be positive");
  if (band_factor < 2) throw ConfigError("band factor must be at least 2");
  box_.lo = domain.lo;
  for (int a = 0; a < 3; ++a) {
    const double cells = std::ceil(domain.extent()[a] / h - 1e-9);
    nodes_[a] = std::max(2, static_cast<int>(cells) + 1);
    box_.hi[a] = domain.lo[a] + (nodes_[a] - 1) * h;
    blocks_[a] = (nodes_[a] + kB - 1) / kB;
  }
  background_.assign(static_cast<std::size_t>(blocks_[0]) * blocks_[1] * blocks_[2], 1);
  rehash(64);
}

void SparseDistanceGrid::rehash(std::size_t capacity) {
  table_keys_.assign(capacity, -1);
  table_slots_.assign(capacity, -1);
  const std::size_t mask = capacity - 1;
  for (std::size_t s = 0; s < block_keys_.size(); ++s) {
    std::size_t pos = mix(block_keys_[s]) & mask;
    while (table_keys_[pos] >= 0) pos = (pos + 1) & mask;
    table_keys_[pos] = block_keys_[s];
    table_slots_[pos] = static_cast<int>(s);
  }
}

int SparseDistanceGrid::find_block(std::int64_t key) const {
  const std::size_t mask = table_keys_.size() - 1;
  std::size_t pos = mix(key) & mask;
  while (true) {
    const std::int64_t k = table_keys_[pos];
    if (k == key) return table_slots_[pos];
    if (k < 0) return -1;
    pos = (pos + 1) & mask;
  }
}

double* SparseDistanceGrid::allocate_block(const Index3& block) {
  const std::int64_t key = block_linear(block);
  const int found = find_block(key);
  if (found >= 0) return values_.data() + static_cast<std::size_t>(found) * kBlockSize;
  if (2 * (block_keys_.size() + 1) > table_keys_.size()) rehash(2 * table_keys_.size());
  const std::size_t mask = table_keys_.size() - 1;
  std::size_t pos = mix(key) & mask;
  while (table_keys_[pos] >= 0) pos = (pos + 1) & mask;
  table_keys_[pos] = key;
  table_slots_[pos] = static_cast<int>(block_keys_.size());
  block_keys_.push_back(key);
  values_.resize(values_.size() + kBlockSize, 0.0);
  return values_.data() + (block_keys_.size() - 1) * kBlockSize;
}

bool SparseDistanceGrid::node_in_stored_block(const Index3& n) const {
  return find_block(block_linear({n[0] / kB, n[1] / kB, n[2] / kB})) >= 0;
}

double SparseDistanceGrid::node_value(const Index3& n) const {
  const Index3 b{n[0] / kB, n[1] / kB, n[2] / kB};
  const std::int64_t key = block_linear(b);
  const int slot = find_block(key);
  if (slot < 0) return background_[key] * delta_;
  const int local = ((n[2] % kB) * kB + n[1] % kB) * kB + n[0] % kB;
  return values_[static_cast<std::size_t>(slot) * kBlockSize + local];
}

Vec3 SparseDistanceGrid::node_position(const Index3& n) const {
  return box_.lo + h_ * Vec3(n[0], n[1], n[2]);
}

void SparseDistanceGrid::for_each_block(
    const std::function<void(const Index3&, const double*)>& fn) const {
  for (std::size_t s = 0; s < block_keys_.size(); ++s) {
    std::int64_t k = block_keys_[s];
    Index3 b;
    b[0] = static_cast<int>(k % blocks_[0]);
    k /= blocks_[0];
    b[1] = static_cast<int>(k % blocks_[1]);
    b[2] = static_cast<int>(k / blocks_[1]);
    fn(b, values_.data() + s * kBlockSize);
  }
}

double SparseDistanceGrid::evaluate(const Vec3& x, Vec3* grad) const {
  const double tol = 1e-12 * h_;
  if (!box_.contains(x, tol)) {
    throw GeometryError("distance grid evaluated outside its box at " + format_point(x));
  }
  Index3 c;
  Vec3 u;
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - box_.lo[a]) / h_;
    int i = static_cast<int>(std::ceil(t)) - 1;
    i = std::clamp(i, 0, nodes_[a] - 2);
    c[a] = i;
    u[a] = std::clamp(t - i, 0.0, 1.0);
  }
  double v[8];
  for (int k = 0; k < 8; ++k) {
    v[k] = node_value({c[0] + (k & 1), c[1] + ((k >> 1) & 1), c[2] + ((k >> 2) & 1)});
  }
  const double x0 = 1.0 - u[0];
  const double y0 = 1.0 - u[1];
  const double z0 = 1.0 - u[2];
  // Bilinear faces in x, then y, then z.
  const double v00 = x0 * v[0] + u[0] * v[1];
  const double v10 = x0 * v[2] + u[0] * v[3];
  const double v01 = x0 * v[4] + u[0] * v[5];
  const double v11 = x0 * v[6] + u[0] * v[7];
  const double v0 = y0 * v00 + u[1] * v10;
  const double v1 = y0 * v01 + u[1] * v11;
  if (grad) {
    const double dx = z0 * (y0 * (v[1] - v[0]) + u[1] * (v[3] - v[2])) +
                      u[2] * (y0 * (v[5] - v[4]) + u[1] * (v[7] - v[6]));
    const double dy = z0 * (v10 - v00) + u[2] * (v11 - v01);
    const double dz = v1 - v0;
    *grad = Vec3(dx, dy, dz) / h_;
  }
  return z0 * v0 + u[2] * v1;
}

double SparseDistanceGrid::value(const Vec3& x) const { return evaluate(x, nullptr); }

Vec3 SparseDistanceGrid::gradient(const Vec3& x) const {
  Vec3 g;
  evaluate(x, &g);
  return g;
}

void SparseDistanceGrid::finalize_background(
    const std::function<double(const Vec3&)>& fallback) {
  const std::size_t total = background_.size();
  std::vector<int> component(total, -1);
  std::vector<std::int64_t> queue;
  auto coords = [&](std::int64_t k) {
    Index3 b;
    b[0] = static_cast<int>(k % blocks_[0]);
    k /= blocks_[0];
    b[1] = static_cast<int>(k % blocks_[1]);
    b[2] = static_cast<int>(k / blocks_[1]);
    return b;
  };
  int label = 0;
  for (std::size_t seed = 0; seed < total; ++seed) {
    if (component[seed] >= 0 || find_block(static_cast<std::int64_t>(seed)) >= 0) continue;
    queue.clear();
    queue.push_back(static_cast<std::int64_t>(seed));
    component[seed] = label;
    double votes = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index3 b = coords(queue[head]);
      for (int dir = 0; dir < 6; ++dir) {
        const int axis = dir / 2;
        const int step = (dir % 2) ? 1 : -1;
        Index3 nb = b;
        nb[axis] += step;
        if (nb[axis] < 0 || nb[axis] >= blocks_[axis]) continue;
        const std::int64_t nk = block_linear(nb);
        const int slot = find_block(nk);
        if (slot < 0) {
          if (component[nk] < 0) {
            component[nk] = label;
            queue.push_back(nk);
          }
          continue;
        }
        // Face layer of the allocated neighbour that touches this block.
        const int layer = step > 0 ? 0 : kB - 1;
        const double* vals = values_.data() + static_cast<std::size_t>(slot) * kBlockSize;
        for (int i = 0; i < kB; ++i) {
          for (int j = 0; j < kB; ++j) {
            Index3 l;
            l[axis] = layer;
            l[(axis + 1) % 3] = i;
            l[(axis + 2) % 3] = j;
            Index3 g{nb[0] * kB + l[0], nb[1] * kB + l[1], nb[2] * kB + l[2]};
            if (g[0] >= nodes_[0] || g[1] >= nodes_[1] || g[2] >= nodes_[2]) continue;
            const double v = vals[(l[2] * kB + l[1]) * kB + l[0]];
            votes += v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
          }
        }
      }
    }
    signed char sign;
    if (votes != 0.0) {
      sign = votes > 0.0 ? 1 : -1;
    } else {
      const Index3 b = coords(static_cast<std::int64_t>(seed));
      const Vec3 center =
          node_position({b[0] * kB, b[1] * kB, b[2] * kB}) + Vec3::Constant(0.5 * (kB - 1) * h_);
      sign = fallback(center) >= 0.0 ? 1 : -1;
    }
    for (std::int64_t k : queue) background_[k] = sign;
    ++label;
  }
}

namespace {

template <class NodeFn>
void fill_block(SparseDistanceGrid& grid, const SparseDistanceGrid::Index3& b, NodeFn&& fn) {
  double* vals = grid.allocate_block(b);
  const auto& n = grid.node_counts();
  for (int k = 0; k < kB; ++k) {
    for (int j = 0; j < kB; ++j) {
      for (int i = 0; i < kB; ++i) {
        const SparseDistanceGrid::Index3 g{b[0] * kB + i, b[1] * kB + j, b[2] * kB + k};
        const int local = (k * kB + j) * kB + i;
        if (g[0] >= n[0] || g[1] >= n[1] || g[2] >= n[2]) {
          vals[local] = 0.0;
          continue;
        }
        vals[local] = std::clamp(fn(grid.node_position(g)), -grid.band(), grid.band());
      }
    }
  }
}

}  // namespace

SparseDistanceGrid build_from_surface(const TriangleSurface& surface, double h_g,
                                      int band_factor, const Box3* domain) {
  surface.validate();
  const TriangleMeshDistance distance(surface);
  Box3 box = domain ? *domain : surface.bounds().expanded((band_factor + 2) * h_g);
  SparseDistanceGrid grid(box, h_g, band_factor);
  const double delta = grid.band();
  const auto blocks = grid.block_counts();

  // Blocks whose node range meets a triangle's bounding box padded by delta.
  std::vector<char> marked(static_cast<std::size_t>(blocks[0]) * blocks[1] * blocks[2], 0);
  for (const auto& tri : surface.triangles) {
    Vec3 lo = surface.vertices[tri[0]];
    Vec3 hi = lo;
    for (int k = 1; k < 3; ++k) {
      lo = lo.cwiseMin(surface.vertices[tri[k]]);
      hi = hi.cwiseMax(surface.vertices[tri[k]]);
    }
    SparseDistanceGrid::Index3 b0, b1;
    bool empty = false;
    for (int a = 0; a < 3; ++a) {
      const double t0 = (lo[a] - delta - grid.box().lo[a]) / h_g;
      const double t1 = (hi[a] + delta - grid.box().lo[a]) / h_g;
      const int n0 = std::max(0, static_cast<int>(std::ceil(t0)));
      const int n1 = std::min(grid.node_counts()[a] - 1, static_cast<int>(std::floor(t1)));
      if (n0 > n1) empty = true;
      b0[a] = n0 / kB;
      b1[a] = n1 / kB;
    }
    if (empty) continue;
    for (int z = b0[2]; z <= b1[2]; ++z)
      for (int y = b0[1]; y <= b1[1]; ++y)
        for (int x = b0[0]; x <= b1[0]; ++x)
          marked[(static_cast<std::size_t>(z) * blocks[1] + y) * blocks[0] + x] = 1;
  }

  for (int z = 0; z < blocks[2]; ++z) {
    for (int y = 0; y < blocks[1]; ++y) {
      for (int x = 0; x < blocks[0]; ++x) {
        if (!marked[(static_cast<std::size_t>(z) * blocks[1] + y) * blocks[0] + x]) continue;
        fill_block(grid, {x, y, z}, [&](const Vec3& p) {
          const ClosestPoint cp = distance.closest(p);
          if (cp.distance > delta) {
            // Outside the band only the sign matters; an ambiguous sign here
            // is not fatal and falls back to the clamp's majority later.
            try {
              return distance.signed_distance(p);
            } catch (const GeometryError&) {
              return std::numeric_limits<double>::quiet_NaN();
            }
          }
          return distance.signed_distance(p);
        });
      }
    }
  }

  // Out-of-band nodes whose sign could not be decided take the sign of the
  // block's other clamped nodes.
  std::vector<SparseDistanceGrid::Index3> stored;
  grid.for_each_block([&](const SparseDistanceGrid::Index3& b, const double*) { stored.push_back(b); });
  for (const auto& b : stored) {
    double* vals = grid.allocate_block(b);
    double vote = 0.0;
    bool any_nan = false;
    for (int i = 0; i < kBlockSize; ++i) {
      if (std::isnan(vals[i])) {
        any_nan = true;
      } else if (std::abs(vals[i]) >= delta) {
        vote += vals[i];
      }
    }
    if (!any_nan) continue;
    for (int i = 0; i < kBlockSize; ++i) {
      if (std::isnan(vals[i])) vals[i] = vote >= 0.0 ? delta : -delta;
    }
  }

  grid.finalize_background([&](const Vec3& p) { return distance.signed_distance(p); });
  return grid;
}

SparseDistanceGrid build_from_analytic(const ImplicitField& field, const Box3& domain,
                                       double h_g, int band_factor) {
  SparseDistanceGrid grid(domain, h_g, band_factor);
  const auto blocks = grid.block_counts();
  // The field is 1-Lipschitz, so a block whose centre is farther than
  // delta + half its diagonal from the surface has no band node.
  const double half_diag = 0.5 * std::sqrt(3.0) * (kB - 1) * h_g;
  for (int z = 0; z < blocks[2]; ++z) {
    for (int y = 0; y < blocks[1]; ++y) {
      for (int x = 0; x < blocks[0]; ++x) {
        const Vec3 center = grid.node_position({x * kB, y * kB, z * kB}) +
                            Vec3::Constant(0.5 * (kB - 1) * h_g);
        if (std::abs(field.value(center)) > grid.band() + half_diag + h_g) continue;
        fill_block(grid, {x, y, z}, [&](const Vec3& p) { return field.value(p); });
      }
    }
  }
  grid.finalize_background([&](const Vec3& p) { return field.value(p); });
  return grid;
}

}  // namespace trigrid
