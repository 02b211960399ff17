#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cuspidal/errors.hpp"
#include "cuspidal/feasibility.hpp"
#include "cuspidal/ik.hpp"

using namespace cuspidal;

namespace {

const ManipulatorModel& illustrative() {
  static const ManipulatorModel m = validate_params(illustrative_params());
  return m;
}

const FeasibilityAnalysis& illustrative_analysis() {
  static const FeasibilityAnalysis a = analyze_feasibility(illustrative());
  return a;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const AnalysisError& e) {
    return e.kind();
  }
  return ErrorKind::NonConvergent;
}

}  // namespace

TEST(Feasibility, IllustrativeStructure) {
  const auto& a = illustrative_analysis();
  EXPECT_EQ(a.reduced.aspects.count, 2);
  EXPECT_EQ(a.reduced.of_aspect(0).size(), 3u);
  EXPECT_EQ(a.reduced.of_aspect(1).size(), 3u);
  EXPECT_FALSE(a.reduced.fragmentation_warning.has_value());
  EXPECT_EQ(a.domains.size(), 4u);
  EXPECT_EQ(a.regions.size(), 4u);
  EXPECT_FALSE(a.surfaces.empty());
  for (const auto& region : a.regions) {
    EXPECT_GT(region.cell_count, 0u);
    EXPECT_FALSE(region.walls.empty());
  }
}

TEST(Feasibility, CharacteristicPointsMapOntoBoundary) {
  const auto& a = illustrative_analysis();
  const auto& m = illustrative();
  for (const auto& per : a.surfaces.per_aspect) {
    for (std::size_t k = 0; k < per.size(); k += 37) {
      const CharacteristicPoint& c = per[k];
      const CrossSectionPoint img = cross_section(forward(m, {0.0, c.q.theta2, c.q.theta3}));
      EXPECT_NEAR(img.rho, c.image.rho, 1e-6);
      EXPECT_NEAR(img.z, c.image.z, 1e-6);
      EXPECT_GT(std::abs(det_jacobian(m, c.q.theta2, c.q.theta3)), 0.0);
    }
  }
}

TEST(Feasibility, DomainsAreInjective) {
  const auto& a = illustrative_analysis();
  const auto& m = illustrative();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  int checked = 0;
  while (checked < 1000) {
    const JointConfig q{0.0, angle(rng), angle(rng)};
    if (std::abs(det_jacobian(m, q.theta2, q.theta3)) < 1e-2) continue;
    const WorkspacePoint x = forward(m, q);
    const auto sols = solve_ik(m, x);
    const int total = static_cast<int>(sols.size());
    for (const auto& d : a.domains) {
      int inside = 0;
      for (const auto& s : sols)
        if (d.contains(a.reduced, m, {s.config.theta2, s.config.theta3}, total)) ++inside;
      EXPECT_LE(inside, 1);
    }
    ++checked;
  }
}

TEST(Feasibility, DomainsCoverEveryAspect) {
  const auto& a = illustrative_analysis();
  for (const auto& d : a.domains) {
    const auto ids = a.reduced.of_aspect(d.aspect);
    EXPECT_EQ(d.retained.size() + d.deleted.size(), ids.size());
    EXPECT_FALSE(d.retained.empty());
  }
}

TEST(Feasibility, NoncuspidalChainHasNoSurfaces) {
  DHParams p = illustrative_params();
  p.a3 = 0.1;
  const auto m = validate_params(p);
  const FeasibilityAnalysis a = analyze_feasibility(m, 256);
  EXPECT_TRUE(a.surfaces.empty());
  EXPECT_EQ(a.domains.size(), static_cast<std::size_t>(a.reduced.aspects.count));
  for (int k = 0; k < a.reduced.aspects.count; ++k) EXPECT_EQ(a.reduced.of_aspect(k).size(), 1u);
}

TEST(Feasibility, PostureChangeWithoutSingularity) {
  const auto& m = illustrative();
  const PostureChange c = plan_posture_change(m, {2.5, 0.0, 0.5}, 1, 3);
  EXPECT_GT(c.min_det, 0.0);
  EXPECT_EQ(c.path.size(), static_cast<std::size_t>(kPostureSamples) + 1);
  EXPECT_GE(c.enclosed_cusps.size(), 1u);
  for (std::size_t k = 0; k < c.path.size(); k += 50)
    EXPECT_GT(std::abs(det_jacobian(m, c.path[k].theta2, c.path[k].theta3)), 0.0);
  EXPECT_EQ(kind_of([&] { plan_posture_change(m, {2.5, 0.0, 0.5}, 3, 0); }), ErrorKind::DifferentAspects);
  EXPECT_EQ(kind_of([&] { plan_posture_change(m, {2.5, 0.0, 0.5}, 0, 2); }), ErrorKind::SingularPath);
  EXPECT_EQ(kind_of([&] { plan_posture_change(m, {2.5, 0.0, 0.5}, 0, 9); }), ErrorKind::InvalidParams);
}

TEST(Feasibility, EnclosureOfSquare) {
  const std::vector<CrossSectionPoint> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_TRUE(encloses(square, {0.5, 0.5}));
  EXPECT_FALSE(encloses(square, {1.5, 0.5}));
  EXPECT_EQ(winding_number(square, {0.5, 0.5}), 1);
  const std::vector<CrossSectionPoint> reversed(square.rbegin(), square.rend());
  EXPECT_EQ(winding_number(reversed, {0.5, 0.5}), -1);
  EXPECT_EQ(winding_number(square, {2.0, 2.0}), 0);
}

TEST(Feasibility, ShortPathIsTrackable) {
  const auto& m = illustrative();
  std::vector<CrossSectionPoint> path;
  for (int k = 0; k <= 20; ++k) path.push_back({2.5 + 0.01 * k, 0.5});
  const PathCheck check = check_path_feasibility(m, path, 0);
  EXPECT_TRUE(check.feasible);
  ASSERT_EQ(check.configs.size(), path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const CrossSectionPoint img = cross_section(forward(m, check.configs[k]));
    EXPECT_NEAR(img.rho, path[k].rho, 1e-8);
    EXPECT_NEAR(img.z, path[k].z, 1e-8);
  }
  EXPECT_EQ(kind_of([&] { check_path_feasibility(m, {{10.0, 0.0}}, 0); }), ErrorKind::StartUnreachable);
  EXPECT_EQ(kind_of([&] { check_path_feasibility(m, {}, 0); }), ErrorKind::InvalidParams);
}

TEST(Feasibility, PathAcrossBoundaryFails) {
  const auto& m = illustrative();
  std::vector<CrossSectionPoint> path;
  for (int k = 0; k <= 100; ++k) path.push_back({2.5 + 0.03 * k, 0.5});
  bool any_fail = false;
  for (int branch = 0; branch < 4; ++branch) any_fail |= !check_path_feasibility(m, path, branch).feasible;
  EXPECT_TRUE(any_fail);
}

TEST(Feasibility, LevelSetMeshIsWellFormed) {
  const auto& m = illustrative();
  const Mesh mesh = level_set_surface(m, illustrative_analysis().reduced.aspects, 0, 64);
  ASSERT_FALSE(mesh.vertices.empty());
  ASSERT_FALSE(mesh.triangles.empty());
  for (const auto& t : mesh.triangles)
    for (int v : t) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, static_cast<int>(mesh.vertices.size()));
    }
}
