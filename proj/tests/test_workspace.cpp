#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "cuspidal/ik.hpp"
#include "cuspidal/workspace.hpp"

using namespace cuspidal;

namespace {

ManipulatorModel chain(double a2, double a3) {
  DHParams p = illustrative_params();
  p.a2 = a2;
  p.a3 = a3;
  return validate_params(p);
}

}  // namespace

TEST(Workspace, RasterCountsMatchIK) {
  const auto m = validate_params(illustrative_params());
  const WorkspaceRaster r(m, 128);
  EXPECT_EQ(r.columns(), 64);
  EXPECT_EQ(r.rows(), 128);
  for (int iz = 3; iz < r.rows(); iz += 11) {
    for (int ix = 2; ix < r.columns(); ix += 13) {
      const CrossSectionPoint c = r.centre(ix, iz);
      EXPECT_EQ(r.count(ix, iz), count_ik(m, {c.rho, 0.0, c.z}).distinct);
      EXPECT_EQ(r.cell_of(c), std::make_pair(ix, iz));
    }
  }
  EXPECT_EQ(r.max_count(), 4);
}

TEST(Workspace, VoidDetection) {
  EXPECT_FALSE(raster_has_void(WorkspaceRaster(validate_params(illustrative_params()), 256)));
  EXPECT_TRUE(raster_has_void(WorkspaceRaster(chain(2.0, 0.1), 256)));
  EXPECT_TRUE(raster_has_void(WorkspaceRaster(chain(2.0, 0.5), 256)));
  EXPECT_FALSE(raster_has_void(WorkspaceRaster(chain(0.5, 1.3), 256)));
}

TEST(Workspace, RegionsHaveUniformCount) {
  const WorkspaceRaster r(validate_params(illustrative_params()), 128);
  const Labeling l = raster_regions(r);
  ASSERT_EQ(l.labels.size(), static_cast<std::size_t>(r.columns() * r.rows()));
  std::vector<int> count_of(l.count, -1);
  for (int iz = 0; iz < r.rows(); ++iz) {
    for (int ix = 0; ix < r.columns(); ++ix) {
      const int label = l.labels[iz * r.columns() + ix];
      ASSERT_GE(label, 0);
      if (count_of[label] < 0) count_of[label] = r.count(ix, iz);
      EXPECT_EQ(count_of[label], r.count(ix, iz));
    }
  }
  std::set<int> counts(count_of.begin(), count_of.end());
  EXPECT_EQ(counts, (std::set<int>{0, 2, 4}));
}
