#pragma once

#include "trigrid/cutquad/decomposition.hpp"
#include "trigrid/octree/fe_grid.hpp"

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace trigrid {

struct CutCellPoints {
  std::vector<VolumePoint> volume;
  std::vector<SurfacePoint> surface;
  double inside_volume = 0.0;
  double surface_area = 0.0;

  std::size_t bytes() const {
    return volume.size() * sizeof(VolumePoint) + surface.size() * sizeof(SurfacePoint);
  }
};

// Quadrature of the cut leaves of a classified grid. Every cut leaf is
// decomposed once at construction to record its inside volume; the point
// sets are kept while they fit the cache budget and rebuilt on demand
// otherwise.
class CutCellQuadrature {
 public:
  CutCellQuadrature(const FeGrid& grid, const ImplicitField& phi, const CutQuadOptions& options,
                    const QuadratureDegrees& degrees, std::size_t cache_bytes = std::size_t{1} << 30);

  // Inside volume of any leaf: full for active, zero for inactive.
  double inside_volume(int leaf) const { return inside_volume_[leaf]; }
  double total_inside_volume() const;
  double total_surface_area() const;

  std::shared_ptr<const CutCellPoints> points(int leaf) const;
  CellDecomposition decomposition(int leaf) const;

  const FeGrid& grid() const { return grid_; }
  const QuadratureDegrees& degrees() const { return degrees_; }
  const CutQuadOptions& options() const { return options_; }

 private:
  std::shared_ptr<const CutCellPoints> compute(int leaf) const;

  const FeGrid& grid_;
  const ImplicitField& phi_;
  CutQuadOptions options_;
  QuadratureDegrees degrees_;
  std::size_t budget_;
  std::vector<double> inside_volume_;
  std::vector<double> surface_area_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<int, std::shared_ptr<const CutCellPoints>> cache_;
  mutable std::size_t cached_bytes_ = 0;
};

}  // namespace trigrid
