#include <sstream>

#include <gtest/gtest.h>

#include "cuspidal/plot.hpp"

using namespace cuspidal;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Plot, CanvasIsDeterministic) {
  auto draw = [] {
    SvgCanvas c(0.0, 1.0, 0.0, 1.0, 200);
    c.rect(0.1, 0.1, 0.4, 0.4, "#eee");
    c.polyline({{0, 0}, {0.5, 0.7}, {1, 1}}, "black");
    c.circle(0.5, 0.5, 4, "red");
    c.cross(0.2, 0.8, 3, "blue");
    c.text(0.5, 0.9, "a < b & c");
    c.axes("rho", "z");
    return c.str();
  };
  const std::string a = draw();
  EXPECT_EQ(a, draw());
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("a &lt; b &amp; c"), std::string::npos);
}

TEST(Plot, PaletteCycles) {
  EXPECT_EQ(palette(0).front(), '#');
  EXPECT_NE(palette(0), palette(1));
  EXPECT_EQ(palette(-1).front(), '#');
}

TEST(Plot, AnalysisOutputs) {
  const auto m = validate_params(illustrative_params());
  const SingularAnalysis a = analyze_singularities(m, 256);
  EXPECT_EQ(first_line(curves_csv(a)), "branch_id,s,theta2,theta3,rho,z");
  const std::string cusps = cusps_csv(a);
  EXPECT_EQ(line_count(cusps), a.cusps.cusps.size() + 1);
  EXPECT_EQ(line_count(nodes_csv(a)), a.nodes.nodes.size() + 1);
  const std::string svg = cross_section_svg(m, a);
  EXPECT_EQ(svg, cross_section_svg(m, a));
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(joint_space_svg(a).find("<polyline"), std::string::npos);
}

TEST(Plot, ScanCsvRows) {
  const std::vector<Bifurcation> b{{2.1082, 4, 2}, {2.8284, 2, 4}};
  const std::string csv = scan_csv(1.0, 1.0, 2.0, b);
  EXPECT_EQ(first_line(csv), "a1,d2,a2,a3,cusps_below,cusps_above");
  EXPECT_EQ(line_count(csv), 3u);
  const std::string svg = parameter_space_svg(1.0, 1.0, 4.0, 4.0, true, {{2.0, b[0]}});
  EXPECT_EQ(svg, parameter_space_svg(1.0, 1.0, 4.0, 4.0, true, {{2.0, b[0]}}));
}

TEST(Plot, MeshObj) {
  Mesh mesh;
  mesh.vertices = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)};
  mesh.triangles = {{0, 1, 2}};
  const std::string obj = mesh_obj(mesh);
  EXPECT_NE(obj.find("f 1 2 3"), std::string::npos);
  EXPECT_EQ(line_count(obj), 5u);
}
