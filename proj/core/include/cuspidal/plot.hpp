#pragma once

#include <string>
#include <vector>

#include "cuspidal/classify.hpp"
#include "cuspidal/feasibility.hpp"
#include "cuspidal/singular.hpp"
#include "cuspidal/workspace.hpp"

namespace cuspidal {

/// Minimal deterministic SVG writer over a data-space viewport.
class SvgCanvas {
 public:
  SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width = 640);

  void rect(double x0, double y0, double x1, double y1, const std::string& fill);
  void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke, double width = 1.5);
  void circle(double x, double y, double radius_px, const std::string& stroke, const std::string& fill = "none");
  void cross(double x, double y, double half_px, const std::string& stroke);
  void dot(double x, double y, double radius_px, const std::string& fill);
  void text(double x, double y, const std::string& label, int size_px = 12);
  void axes(const std::string& x_label, const std::string& y_label);

  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  int width_, height_;
  std::string body_;
};

/// Color of palette entry k (cycled).
std::string palette(int k);

/// Aspects shaded on the torus, singular curves on top, optional
/// characteristic points and joint path.
std::string joint_space_svg(const SingularAnalysis& analysis, const CharacteristicSurfaceSet* surfaces = nullptr,
                            const std::vector<JointConfig>* path = nullptr);

/// Half cross-section with boundaries, cusps (circles), nodes (crosses) and
/// isolated points; the raster shades solution counts and the loop is drawn
/// as a thin path when given.
std::string cross_section_svg(const ManipulatorModel& model, const SingularAnalysis& analysis,
                              const WorkspaceRaster* raster = nullptr,
                              const std::vector<CrossSectionPoint>* loop = nullptr);

std::string reduced_aspects_svg(const ReducedAspectMap& map);
std::string uniqueness_domain_svg(const ReducedAspectMap& map, const UniquenessDomain& domain);
std::string feasible_region_svg(const ManipulatorModel& model, const SingularAnalysis& analysis,
                                const WorkspaceRaster& raster, const FeasibleRegion& region);

/// Section (a2, a3) of the parameter space at fixed a1, d2 with the cusp
/// surfaces C1..C4 and, when with_nodes, the node surfaces E1..E3.
std::string parameter_space_svg(double a1, double d2, double a2_max, double a3_max, bool with_nodes,
                                const std::vector<std::pair<double, Bifurcation>>& oracle = {});

/// branch_id,s,theta2,theta3,rho,z with s the normalized joint-space arc
/// length along each curve.
std::string curves_csv(const SingularAnalysis& analysis);
std::string cusps_csv(const SingularAnalysis& analysis);
std::string nodes_csv(const SingularAnalysis& analysis);
std::string scan_csv(double a1, double d2, double a2, const std::vector<Bifurcation>& boundaries);
std::string path_csv(const PostureChange& change);

std::string mesh_obj(const Mesh& mesh);

}  // namespace cuspidal
