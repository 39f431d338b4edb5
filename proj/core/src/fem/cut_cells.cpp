#include "trigrid/fem/cut_cells.hpp"

#include <cmath>
#include <numeric>

namespace trigrid {

CutCellQuadrature::CutCellQuadrature(const FeGrid& grid, const ImplicitField& phi,
                                     const CutQuadOptions& options,
                                     const QuadratureDegrees& degrees, std::size_t cache_bytes)
    : grid_(grid), phi_(phi), options_(options), degrees_(degrees), budget_(cache_bytes) {
  options_.lattice_origin = grid.box().lo;
  const int n = static_cast<int>(grid.size());
  inside_volume_.assign(n, 0.0);
  surface_area_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const CellClass c = grid.leaf(i).label;
    if (c == CellClass::Active) {
      inside_volume_[i] = std::pow(grid.cell_edge(i), 3);
    } else if (is_cut(c)) {
      auto pts = compute(i);
      inside_volume_[i] = pts->inside_volume;
      surface_area_[i] = pts->surface_area;
      if (cached_bytes_ + pts->bytes() <= budget_) {
        cached_bytes_ += pts->bytes();
        cache_.emplace(i, std::move(pts));
      }
    }
  }
}

double CutCellQuadrature::total_inside_volume() const {
  return std::accumulate(inside_volume_.begin(), inside_volume_.end(), 0.0);
}

double CutCellQuadrature::total_surface_area() const {
  return std::accumulate(surface_area_.begin(), surface_area_.end(), 0.0);
}

CellDecomposition CutCellQuadrature::decomposition(int leaf) const {
  return decompose_cell(grid_.cell_box(leaf), phi_, options_);
}

std::shared_ptr<const CutCellPoints> CutCellQuadrature::compute(int leaf) const {
  const CellDecomposition dec = decomposition(leaf);
  auto pts = std::make_shared<CutCellPoints>();
  emit_quadrature(dec, degrees_, pts->volume, &pts->surface);
  pts->inside_volume = dec.inside_volume();
  pts->surface_area = dec.surface_area();
  return pts;
}

std::shared_ptr<const CutCellPoints> CutCellQuadrature::points(int leaf) const {
  if (!is_cut(grid_.leaf(leaf).label)) {
    throw Error("cut-cell quadrature requested for uncut leaf " + std::to_string(leaf));
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(leaf);
    if (it != cache_.end()) return it->second;
  }
  return compute(leaf);
}

}  // namespace trigrid
