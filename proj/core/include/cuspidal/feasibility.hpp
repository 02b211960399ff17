#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cuspidal/kinematics.hpp"
#include "cuspidal/model.hpp"
#include "cuspidal/singular.hpp"
#include "cuspidal/workspace.hpp"

namespace cuspidal {

inline constexpr int kFeasibilityResolution = 512;

/// Nonsingular preimage of a boundary sample inside an aspect.
struct CharacteristicPoint {
  TorusPoint q;
  int aspect = -1;
  /// Boundary sample whose preimage this is.
  CrossSectionPoint image;
  int branch_id = 0;
};

struct CharacteristicSurfaceSet {
  /// Points per aspect id.
  std::vector<std::vector<CharacteristicPoint>> per_aspect;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
};

/// Solves the inverse kinematics at every vertex image of every boundary
/// curve, drops the singular solutions and bins the rest by aspect.
CharacteristicSurfaceSet characteristic_surfaces(const ManipulatorModel& model, const SingularAnalysis& analysis);
CharacteristicSurfaceSet characteristic_surfaces(const ManipulatorModel& model, int n = kDefaultResolution);

struct ReducedAspect {
  int id = 0;
  int aspect = 0;
  /// Number of solutions over the image region.
  int ik_count = 0;
  /// Label of the image region in the workspace raster.
  int region = -1;
  std::size_t nodes = 0;
};

struct ReducedAspectMap {
  AspectMap aspects;
  /// Per grid node (index j * N + i): reduced-aspect id (-1 on the dilated
  /// characteristic surfaces) and total solution count of its image.
  std::vector<int> labels;
  std::vector<int> counts;
  std::vector<ReducedAspect> reduced;
  /// More than three reduced aspects in some aspect of an orthogonal chain
  /// with d3 = 0, which points at a resolution artifact.
  std::optional<std::string> fragmentation_warning;

  std::vector<int> of_aspect(int aspect) const;
  /// Reduced aspect holding q, given the number of solutions at f(q); -1
  /// when no nearby node decides.
  int reduced_aspect_of(const ManipulatorModel& model, const TorusPoint& q, int ik_count) const;
};

/// Characteristic surfaces are rasterized as the nodes where the image
/// solution count changes inside an aspect, dilated by two cells; the
/// remaining nodes of each aspect are flood filled.
ReducedAspectMap reduced_aspects(const ManipulatorModel& model, const AspectMap& aspects, const WorkspaceRaster& raster);
ReducedAspectMap reduced_aspects(const ManipulatorModel& model, int n = kFeasibilityResolution);

struct UniquenessDomain {
  int id = 0;
  int aspect = 0;
  std::vector<int> retained;
  std::vector<int> deleted;

  bool contains(const ReducedAspectMap& map, const ManipulatorModel& model, const TorusPoint& q, int ik_count) const;
};

/// One domain per aspect and per choice of the reduced aspect kept in each
/// group sharing an image region.
std::vector<UniquenessDomain> uniqueness_domains(const ReducedAspectMap& map);

/// Raster cells of the workspace image of one uniqueness domain.
struct FeasibleRegion {
  int domain = 0;
  int aspect = 0;
  std::vector<char> cells;
  std::size_t cell_count = 0;
  /// Boundary samples that paths in the region cannot cross: images of
  /// characteristic points bordering a deleted reduced aspect.
  std::vector<CrossSectionPoint> walls;
};

struct FeasibilityAnalysis {
  SingularAnalysis singular;
  CharacteristicSurfaceSet surfaces;
  ReducedAspectMap reduced;
  std::vector<UniquenessDomain> domains;
  WorkspaceRaster raster;
  std::vector<FeasibleRegion> regions;
  /// Raster cells of the image of each aspect.
  std::vector<std::vector<char>> aspect_images;
};

std::vector<FeasibleRegion> feasible_regions(const ManipulatorModel& model, const ReducedAspectMap& map,
                                             const std::vector<UniquenessDomain>& domains,
                                             const WorkspaceRaster& raster,
                                             const CharacteristicSurfaceSet& surfaces);

FeasibilityAnalysis analyze_feasibility(const ManipulatorModel& model, int n = kFeasibilityResolution);

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Surface (rho, z, cos theta2) over the nonsingular nodes of one aspect,
/// sampled on at most cells_across x cells_across nodes.
Mesh level_set_surface(const ManipulatorModel& model, const AspectMap& aspects, int aspect, int cells_across = 256);

struct PostureChange {
  JointConfig start;
  JointConfig goal;
  int aspect = -1;
  std::vector<JointConfig> path;
  /// Smallest |det J| along the sampled path.
  double min_det = 0.0;
  std::vector<CrossSectionPoint> loop;
  /// Indices into the cusp list of the cusps inside the loop (even-odd rule).
  std::vector<int> enclosed_cusps;
  /// Winding number of the loop around every cusp.
  std::vector<int> winding;
};

inline constexpr int kPostureSamples = 1000;

/// Straight joint-space line between solutions i and j (indices into
/// solve_ik(model, p)). Throws AnalysisError with kind DifferentAspects or
/// SingularPath, InvalidParams for bad indices.
PostureChange plan_posture_change(const ManipulatorModel& model, const WorkspacePoint& p, int i, int j,
                                  const AspectMap& aspects, const std::vector<CuspPoint>& cusps);
PostureChange plan_posture_change(const ManipulatorModel& model, const WorkspacePoint& p, int i, int j);

/// Even-odd point-in-polygon test; the polygon is closed implicitly.
bool encloses(const std::vector<CrossSectionPoint>& polygon, const CrossSectionPoint& p);
int winding_number(const std::vector<CrossSectionPoint>& polygon, const CrossSectionPoint& p);

struct PathCheck {
  bool feasible = true;
  /// Polyline vertex starting the segment where the branch terminated.
  std::size_t failed_vertex = 0;
  /// Branch configuration at every reached polyline vertex.
  std::vector<JointConfig> configs;
};

inline constexpr double kBranchStep = 0.05;

/// Follows solution start_branch of solve_ik at path.front() along the
/// polyline. Throws AnalysisError(StartUnreachable) when the start has no
/// solution, InvalidParams for a bad branch index.
PathCheck check_path_feasibility(const ManipulatorModel& model, const std::vector<CrossSectionPoint>& path,
                                 int start_branch);

}  // namespace cuspidal
