#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cuspidal/kinematics.hpp"
#include "cuspidal/model.hpp"
#include "cuspidal/torus.hpp"

namespace cuspidal {

inline constexpr int kDefaultResolution = 1024;

/// Which scalar field a singular curve is a zero set of.
enum class CurveSource {
  Determinant,   // det J at theta1 = 0 (any model)
  FirstFactor,   // a2 + c3 a3 (horizontal lines)
  SecondFactor,  // c2 (s3 a2 - c3 d2) + s3 a1 with the model's signs
};

struct SingularCurve {
  int branch_id = 0;
  CurveSource source = CurveSource::Determinant;
  std::vector<TorusPoint> vertices;
  bool closed = true;
};

/// Image of a singular curve in the half cross-section, vertex for vertex.
struct BoundaryCurve {
  int branch_id = 0;
  std::vector<CrossSectionPoint> points;
  /// The whole curve maps to one point (first-factor lines with d3 = 0).
  bool isolated_point = false;
};

struct AspectMap {
  int resolution = 0;
  /// Label of every grid node, index j * N + i.
  std::vector<int> labels;
  /// Sign of det J on each aspect.
  std::vector<int> signs;
  int count = 0;

  /// Aspect containing q, or -1 when q is too close to a singular curve to
  /// decide from the grid.
  int aspect_of(const ManipulatorModel& model, double theta2, double theta3) const;
};

struct CuspPoint {
  CrossSectionPoint location;
  TorusPoint source;
  int branch_id = 0;
  /// tan(theta3 / 2) of the triple root; infinite at theta3 = pi.
  double t = 0.0;
  /// |P|, |P'|, |P''| relative to the coefficient norm; zero when the model
  /// has no quartic (non-orthogonal chains).
  std::array<double, 3> residuals{};
};

struct NodePoint {
  CrossSectionPoint location;
  TorusPoint first;
  TorusPoint second;
  int first_branch = 0;
  int second_branch = 0;
  /// |sin| of the angle between the two boundary tangents.
  double crossing_sine = 0.0;
};

struct CuspSearch {
  std::vector<CuspPoint> cusps;
  /// Tangent reversals whose refinement did not converge.
  std::vector<CuspPoint> nonconvergent;
};

struct NodeSearch {
  std::vector<NodePoint> nodes;
  /// Non-transversal contacts, reported but not counted.
  std::vector<NodePoint> tangencies;
};

struct GenericityResult {
  bool generic = true;
  /// Smallest |grad det J| on the traced zero set, for the chain scaled to
  /// unit length a1 + a2 + a3 + |d2| + |d3| = 1.
  double min_gradient = 0.0;
  TorusPoint witness;
};

/// Singular field evaluated on the given model.
double singular_field(const ManipulatorModel& model, CurveSource source, double theta2, double theta3);

/// Zero set of det J on the torus. Orthogonal chains with d3 = 0 trace the
/// two factors separately. Throws AnalysisError(ResolutionTooLow) when a
/// curve has fewer than 8 vertices.
std::vector<SingularCurve> trace_singular_curves(const ManipulatorModel& model, int n = kDefaultResolution);

AspectMap compute_aspects(const ManipulatorModel& model, int n = kDefaultResolution);

BoundaryCurve map_boundary(const ManipulatorModel& model, const SingularCurve& curve);

CuspSearch find_cusps(const ManipulatorModel& model, const std::vector<SingularCurve>& curves);
CuspSearch find_cusps(const ManipulatorModel& model);

NodeSearch find_nodes(const ManipulatorModel& model, const std::vector<SingularCurve>& curves);
NodeSearch find_nodes(const ManipulatorModel& model);

GenericityResult genericity_check(const ManipulatorModel& model, const std::vector<SingularCurve>& curves);
GenericityResult genericity_check(const ManipulatorModel& model);

/// Everything the singular module computes for one model.
struct SingularAnalysis {
  int resolution = 0;
  std::vector<SingularCurve> curves;
  std::vector<BoundaryCurve> boundaries;
  AspectMap aspects;
  CuspSearch cusps;
  NodeSearch nodes;
  /// Images of curves that collapse to a point.
  std::vector<CrossSectionPoint> isolated_points;
  GenericityResult genericity;
};

/// Runs the full pipeline, doubling the resolution (up to 8192) while a
/// curve is too short to trace.
SingularAnalysis analyze_singularities(const ManipulatorModel& model, int n = kDefaultResolution);

}  // namespace cuspidal
