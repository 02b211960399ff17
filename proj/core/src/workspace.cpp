#include "cuspidal/workspace.hpp"

#include <algorithm>
#include <cmath>

#include "cuspidal/ik.hpp"
#include "cuspidal/torus.hpp"

namespace cuspidal {

WorkspaceRaster::WorkspaceRaster(const ManipulatorModel& model, int cells_across) {
  const double L = model.length_scale();
  nz_ = cells_across;
  nx_ = cells_across / 2;
  cell_ = 2.0 * L / cells_across;
  z_min_ = -L;
  counts_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(nz_), 0);
  // Counts depend on z only through z^2: fill the upper half and mirror.
  const int half = nz_ / 2;
  parallel_for(static_cast<std::size_t>(nz_ - half), [&](std::size_t r) {
    const int iz = half + static_cast<int>(r);
    for (int ix = 0; ix < nx_; ++ix) {
      const CrossSectionPoint c = centre(ix, iz);
      const int n = count_ik(model, {c.rho, 0.0, c.z}).distinct;
      counts_[static_cast<std::size_t>(iz * nx_ + ix)] = n;
      const int mirror = nz_ - 1 - iz;
      counts_[static_cast<std::size_t>(mirror * nx_ + ix)] = n;
    }
  });
}

CrossSectionPoint WorkspaceRaster::centre(int ix, int iz) const {
  return {(ix + 0.5) * cell_, z_min_ + (iz + 0.5) * cell_};
}

std::pair<int, int> WorkspaceRaster::cell_of(const CrossSectionPoint& p) const {
  const int ix = std::clamp(static_cast<int>(std::floor(p.rho / cell_)), 0, nx_ - 1);
  const int iz = std::clamp(static_cast<int>(std::floor((p.z - z_min_) / cell_)), 0, nz_ - 1);
  return {ix, iz};
}

int WorkspaceRaster::max_count() const { return *std::max_element(counts_.begin(), counts_.end()); }

bool raster_has_void(const WorkspaceRaster& raster) {
  const int nx = raster.columns(), nz = raster.rows();
  std::vector<int> label(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz), -1);
  std::vector<int> stack;
  for (int seed = 0; seed < nx * nz; ++seed) {
    if (label[static_cast<std::size_t>(seed)] != -1 || raster.count(seed % nx, seed / nx) != 0) continue;
    label[static_cast<std::size_t>(seed)] = seed;
    stack.push_back(seed);
    int size = 0;
    bool exits = false;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      ++size;
      const int ix = cur % nx, iz = cur / nx;
      if (ix == 0 || ix == nx - 1 || iz == 0 || iz == nz - 1) exits = true;
      const int nb[4][2] = {{ix + 1, iz}, {ix - 1, iz}, {ix, iz + 1}, {ix, iz - 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= nz) continue;
        const int k = q[1] * nx + q[0];
        if (label[static_cast<std::size_t>(k)] != -1 || raster.count(q[0], q[1]) != 0) continue;
        label[static_cast<std::size_t>(k)] = seed;
        stack.push_back(k);
      }
    }
    if (!exits && size >= 2) return true;
  }
  return false;
}

Labeling raster_regions(const WorkspaceRaster& raster) {
  const int nx = raster.columns(), nz = raster.rows();
  Labeling out;
  out.labels.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nz), -1);
  std::vector<int> stack;
  for (int seed = 0; seed < nx * nz; ++seed) {
    if (out.labels[static_cast<std::size_t>(seed)] != -1) continue;
    const int value = raster.count(seed % nx, seed / nx);
    out.labels[static_cast<std::size_t>(seed)] = out.count;
    stack.push_back(seed);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const int ix = cur % nx, iz = cur / nx;
      const int nb[4][2] = {{ix + 1, iz}, {ix - 1, iz}, {ix, iz + 1}, {ix, iz - 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= nz) continue;
        const int k = q[1] * nx + q[0];
        if (out.labels[static_cast<std::size_t>(k)] != -1 || raster.count(q[0], q[1]) != value) continue;
        out.labels[static_cast<std::size_t>(k)] = out.count;
        stack.push_back(k);
      }
    }
    ++out.count;
  }
  return out;
}

}  // namespace cuspidal
