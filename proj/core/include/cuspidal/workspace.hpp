#pragma once

#include <vector>

#include "cuspidal/kinematics.hpp"
#include "cuspidal/model.hpp"
#include "cuspidal/torus.hpp"

namespace cuspidal {

/// Number of distinct inverse kinematic solutions sampled at the centres of
/// a square raster over the half cross-section rho in [0, L], z in [-L, L],
/// L = a1 + a2 + a3 + |d2| + |d3|.
class WorkspaceRaster {
 public:
  WorkspaceRaster(const ManipulatorModel& model, int cells_across = 512);

  int columns() const { return nx_; }
  int rows() const { return nz_; }
  double cell_size() const { return cell_; }
  int count(int ix, int iz) const { return counts_[static_cast<std::size_t>(iz * nx_ + ix)]; }
  CrossSectionPoint centre(int ix, int iz) const;
  /// Cell containing p, clamped to the raster.
  std::pair<int, int> cell_of(const CrossSectionPoint& p) const;
  int max_count() const;

 private:
  int nx_ = 0, nz_ = 0;
  double cell_ = 0.0, z_min_ = 0.0;
  std::vector<int> counts_;
};

/// A void is a connected set of at least two unreachable cells enclosed by
/// reachable ones. Unreachable pockets that touch the first axis (between the
/// points where the outer boundary meets it) are not voids.
bool raster_has_void(const WorkspaceRaster& raster);

/// Connected regions of cells with equal solution counts (4-connected),
/// labels indexed iz * columns + ix.
Labeling raster_regions(const WorkspaceRaster& raster);

}  // namespace cuspidal
