#include "trigrid/octree/classify.hpp"

#include "trigrid/log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trigrid {

namespace {

CellClass corner_class(const FeGrid& grid, int i, const ImplicitField& phi, double cos_theta) {
  const Box3 b = grid.cell_box(i);
  double lo = 0.0;
  double hi = 0.0;
  Vec3 x[8];
  for (int k = 0; k < 8; ++k) {
    x[k] = Vec3(k & 1 ? b.hi[0] : b.lo[0], k & 2 ? b.hi[1] : b.lo[1], k & 4 ? b.hi[2] : b.lo[2]);
    double v;
    try {
      v = phi.value(x[k]);
    } catch (const Error& e) {
      throw GeometryError("classification of cell " + std::to_string(i) + " failed: " + e.what());
    }
    lo = k ? std::min(lo, v) : v;
    hi = k ? std::max(hi, v) : v;
  }
  if (lo >= 0.0) return CellClass::Active;
  if (hi < 0.0) return CellClass::Inactive;

  Vec3 n[8];
  for (int k = 0; k < 8; ++k) {
    try {
      n[k] = unit_normal(phi, x[k]);
    } catch (const GeometryError&) {
      // A vanishing gradient marks a medial-axis point: treat as sharp.
      return CellClass::CutExtraordinary;
    }
  }
  for (int a = 0; a < 8; ++a)
    for (int c = a + 1; c < 8; ++c)
      if (n[a].dot(n[c]) < cos_theta) return CellClass::CutExtraordinary;
  return CellClass::CutOrdinary;
}

}  // namespace

bool lattice_has_sign_change(const ImplicitField& phi, const Box3& cell, int n) {
  bool pos = false;
  bool neg = false;
  const Vec3 step = cell.extent() / n;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const Vec3 x = cell.lo + Vec3(i * step[0], j * step[1], k * step[2]);
        if (phi.value(x) >= 0.0) {
          pos = true;
        } else {
          neg = true;
        }
        if (pos && neg) return true;
      }
  return false;
}

ClassifyStats classify(FeGrid& grid, const ImplicitField& phi, const ClassifyOptions& options) {
  if (!(options.cos_theta > 0.0 && options.cos_theta < 1.0)) {
    throw ConfigError("cos_theta must lie in (0, 1)");
  }
  const int n = static_cast<int>(grid.size());
  for (int i = 0; i < n; ++i) grid.set_label(i, corner_class(grid, i, phi, options.cos_theta));

  ClassifyStats stats;
  if (options.h_sample > 0.0) {
    // Face neighbours of corner-detected cut cells, supersampled once.
    std::vector<char> candidate(n, 0);
    for (int i = 0; i < n; ++i) {
      if (!is_cut(grid.leaf(i).label)) continue;
      for (int j : grid.face_neighbors(i))
        if (!is_cut(grid.leaf(j).label)) candidate[j] = 1;
    }
    for (int j = 0; j < n; ++j) {
      if (!candidate[j]) continue;
      ++stats.supersampled;
      const double h = grid.cell_edge(j);
      const double spacing = std::max(options.h_sample, h / 16.0);
      const int m = std::max(1, static_cast<int>(std::ceil(h / spacing - 1e-9)));
      if (m > 1 && lattice_has_sign_change(phi, grid.cell_box(j), m)) {
        grid.set_label(j, CellClass::CutExtraordinary);
        ++stats.promoted;
      }
    }
  }
  for (const auto& c : grid.leaves()) {
    switch (c.label) {
      case CellClass::Active: ++stats.active; break;
      case CellClass::Inactive: ++stats.inactive; break;
      case CellClass::CutOrdinary: ++stats.cut_ordinary; break;
      case CellClass::CutExtraordinary: ++stats.cut_extraordinary; break;
      default: break;
    }
  }
  return stats;
}

void refine_toward_boundary(FeGrid& grid, const ImplicitField& phi, int levels, double h_min,
                            const ClassifyOptions& options) {
  bool warned = false;
  for (int sweep = 0; sweep < levels; ++sweep) {
    classify(grid, phi, options);
    std::vector<char> flags(grid.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double h = grid.cell_edge(static_cast<int>(i));
      if (is_cut(grid.leaf(static_cast<int>(i)).label) && h > h_min * (1.0 + 1e-9)) {
        flags[i] = 1;
        any = true;
        if (!warned && phi.resolution() > 0.0 && 0.5 * h < phi.resolution() * (1.0 - 1e-9)) {
          std::ostringstream msg;
          msg << "refining below the geometry resolution (" << 0.5 * h << " < "
              << phi.resolution() << "); the geometry cannot resolve further";
          log_warning(msg.str());
          warned = true;
        }
      }
    }
    if (!any) break;
    grid.refine(flags);
  }
  classify(grid, phi, options);
}

void refine_to_level_in_domain(FeGrid& grid, const ImplicitField& phi, int level,
                               const ClassifyOptions& options) {
  while (true) {
    std::vector<char> flags(grid.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const int ii = static_cast<int>(i);
      if (grid.leaf(ii).level >= level) continue;
      const double half_diag = 0.5 * std::sqrt(3.0) * grid.cell_edge(ii);
      if (phi.value(grid.cell_center(ii)) <= -half_diag) continue;
      flags[i] = 1;
      any = true;
    }
    if (!any) break;
    grid.refine(flags);
  }
  classify(grid, phi, options);
}

}  // namespace trigrid
