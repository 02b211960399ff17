#include "cuspidal/plot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <fmt/format.h>

namespace cuspidal {

namespace {

constexpr int kMargin = 48;
constexpr int kShadeCells = 128;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
const char* const kTint[] = {"#c6dbef", "#fcbba1", "#c7e9c0", "#fdd0a2", "#dadaeb",
                             "#e7d4c8", "#fbd5ea", "#c2ecf1", "#eeeeb5", "#e0e0e0"};

std::string tint(int k) {
  const int n = static_cast<int>(std::size(kTint));
  return kTint[((k % n) + n) % n];
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string grey(int count) {
  static const char* const shades[] = {"#ffffff", "#f0f0f0", "#d9d9d9", "#bdbdbd", "#969696"};
  return shades[std::clamp(count / 2 + (count > 0 ? 1 : 0), 0, 4)];
}

// Splits a torus polyline where it wraps so no segment crosses the plot.
std::vector<std::vector<std::pair<double, double>>> torus_pieces(const std::vector<TorusPoint>& vertices,
                                                                 bool closed) {
  std::vector<std::vector<std::pair<double, double>>> pieces(1);
  const std::size_t n = vertices.size();
  const std::size_t count = closed ? n + 1 : n;
  for (std::size_t k = 0; k < count; ++k) {
    const TorusPoint& v = vertices[k % n];
    if (!pieces.back().empty()) {
      const auto& prev = pieces.back().back();
      if (std::abs(prev.first - v.theta2) > std::numbers::pi || std::abs(prev.second - v.theta3) > std::numbers::pi)
        pieces.emplace_back();
    }
    pieces.back().emplace_back(v.theta2, v.theta3);
  }
  return pieces;
}

void draw_boundaries(SvgCanvas& svg, const SingularAnalysis& analysis) {
  for (const BoundaryCurve& b : analysis.boundaries) {
    if (b.isolated_point) continue;
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : b.points) pts.emplace_back(p.rho, p.z);
    if (!pts.empty()) pts.push_back(pts.front());
    svg.polyline(pts, palette(b.branch_id));
  }
  for (const auto& p : analysis.isolated_points) svg.dot(p.rho, p.z, 3.5, "#000000");
  for (const auto& c : analysis.cusps.cusps) svg.circle(c.location.rho, c.location.z, 5.0, "#000000");
  for (const auto& n : analysis.nodes.nodes) svg.cross(n.location.rho, n.location.z, 5.0, "#000000");
}

void shade_raster(SvgCanvas& svg, const WorkspaceRaster& raster, const std::vector<char>* only) {
  const double h = raster.cell_size();
  for (int iz = 0; iz < raster.rows(); ++iz) {
    for (int ix = 0; ix < raster.columns(); ++ix) {
      const std::size_t k = static_cast<std::size_t>(iz * raster.columns() + ix);
      const int count = raster.count(ix, iz);
      if (count == 0) continue;
      if (only && !(*only)[k]) continue;
      const CrossSectionPoint c = raster.centre(ix, iz);
      svg.rect(c.rho - h / 2, c.z - h / 2, c.rho + h / 2, c.z + h / 2, only ? "#c6dbef" : grey(count));
    }
  }
}

void shade_torus(SvgCanvas& svg, int n, const std::function<std::string(std::size_t)>& fill) {
  const int stride = std::max(1, n / kShadeCells);
  const double h = 2.0 * std::numbers::pi / n * stride;
  for (int j = 0; j < n; j += stride) {
    for (int i = 0; i < n; i += stride) {
      const std::string f = fill(static_cast<std::size_t>(j * n + i));
      if (f.empty()) continue;
      const double t2 = -std::numbers::pi + i * (2.0 * std::numbers::pi / n);
      const double t3 = -std::numbers::pi + j * (2.0 * std::numbers::pi / n);
      svg.rect(t2 - h / 2, t3 - h / 2, t2 + h / 2, t3 + h / 2, f);
    }
  }
}

}  // namespace

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), width_(width) {
  const double aspect = (y_max - y_min) / (x_max - x_min);
  height_ = static_cast<int>(std::lround((width - 2 * kMargin) * aspect)) + 2 * kMargin;
}

double SvgCanvas::px(double x) const { return kMargin + (x - x_min_) / (x_max_ - x_min_) * (width_ - 2 * kMargin); }

double SvgCanvas::py(double y) const {
  return height_ - kMargin - (y - y_min_) / (y_max_ - y_min_) * (height_ - 2 * kMargin);
}

void SvgCanvas::rect(double x0, double y0, double x1, double y1, const std::string& fill) {
  body_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", px(x0),
                       py(y1), px(x1) - px(x0), py(y0) - py(y1), fill);
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                         double width) {
  if (points.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt::format("{:.2f}", width) +
           "\" points=\"";
  for (std::size_t k = 0; k < points.size(); ++k) {
    body_ += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", px(points[k].first), py(points[k].second));
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double x, double y, double radius_px, const std::string& stroke, const std::string& fill) {
  body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" stroke=\"{}\" fill=\"{}\" stroke-width=\"1.5\"/>\n",
                       px(x), py(y), radius_px, stroke, fill);
}

void SvgCanvas::dot(double x, double y, double radius_px, const std::string& fill) {
  body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"/>\n", px(x), py(y), radius_px,
                       fill);
}

void SvgCanvas::cross(double x, double y, double half_px, const std::string& stroke) {
  const double cx = px(x), cy = py(y);
  body_ += fmt::format(
      "<path d=\"M{:.2f},{:.2f} L{:.2f},{:.2f} M{:.2f},{:.2f} L{:.2f},{:.2f}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
      cx - half_px, cy - half_px, cx + half_px, cy + half_px, cx - half_px, cy + half_px, cx + half_px,
      cy - half_px, stroke);
}

void SvgCanvas::text(double x, double y, const std::string& label, int size_px) {
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"{}\">{}</text>\n",
                       px(x), py(y), size_px, xml_escape(label));
}

void SvgCanvas::axes(const std::string& x_label, const std::string& y_label) {
  const double l = px(x_min_), r = px(x_max_), b = py(y_min_), t = py(y_max_);
  body_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                       "stroke=\"#000000\"/>\n",
                       l, t, r - l, b - t);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       (l + r) / 2, b + 32, x_label);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
                       "text-anchor=\"middle\" transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
                       l - 30, (t + b) / 2, l - 30, (t + b) / 2, y_label);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n",
                       l, b + 14, x_min_);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"end\">{:.3g}</text>\n",
                       r, b + 14, x_max_);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"end\">{:.3g}</text>\n",
                       l - 4, b, y_min_);
  body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"end\">{:.3g}</text>\n",
                       l - 4, t + 10, y_max_);
}

std::string SvgCanvas::str() const {
  return fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
                     "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n{}</svg>\n",
                     width_, height_, width_, height_, body_);
}

std::string palette(int k) {
  const int n = static_cast<int>(std::size(kPalette));
  return kPalette[((k % n) + n) % n];
}

std::string joint_space_svg(const SingularAnalysis& analysis, const CharacteristicSurfaceSet* surfaces,
                            const std::vector<JointConfig>* path) {
  const double pi = std::numbers::pi;
  SvgCanvas svg(-pi, pi, -pi, pi);
  const AspectMap& a = analysis.aspects;
  if (a.resolution > 0) shade_torus(svg, a.resolution, [&](std::size_t k) { return tint(a.labels[k]); });
  for (const SingularCurve& c : analysis.curves) {
    for (const auto& piece : torus_pieces(c.vertices, c.closed)) svg.polyline(piece, "#000000", 2.0);
  }
  if (surfaces) {
    for (const auto& pts : surfaces->per_aspect)
      for (const auto& p : pts) svg.dot(p.q.theta2, p.q.theta3, 1.2, palette(p.aspect));
  }
  if (path && !path->empty()) {
    std::vector<TorusPoint> v;
    for (const auto& q : *path) v.push_back({q.theta2, q.theta3});
    for (const auto& piece : torus_pieces(v, false)) svg.polyline(piece, "#2ca02c", 2.0);
    svg.dot(v.front().theta2, v.front().theta3, 4.0, "#2ca02c");
    svg.circle(v.back().theta2, v.back().theta3, 5.0, "#2ca02c");
  }
  svg.axes("theta2 (rad)", "theta3 (rad)");
  return svg.str();
}

std::string cross_section_svg(const ManipulatorModel& model, const SingularAnalysis& analysis,
                              const WorkspaceRaster* raster, const std::vector<CrossSectionPoint>* loop) {
  const double L = model.length_scale();
  SvgCanvas svg(0.0, L, -L, L, 420);
  if (raster) shade_raster(svg, *raster, nullptr);
  draw_boundaries(svg, analysis);
  if (loop && !loop->empty()) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : *loop) pts.emplace_back(p.rho, p.z);
    svg.polyline(pts, "#2ca02c", 1.0);
  }
  svg.axes("rho", "z");
  return svg.str();
}

std::string reduced_aspects_svg(const ReducedAspectMap& map) {
  const double pi = std::numbers::pi;
  SvgCanvas svg(-pi, pi, -pi, pi);
  const int n = map.aspects.resolution;
  shade_torus(svg, n, [&](std::size_t k) { return map.labels[k] < 0 ? std::string("#404040") : tint(map.labels[k]); });
  for (const ReducedAspect& r : map.reduced) {
    // Label at the first node of the component in scan order.
    const auto it = std::find(map.labels.begin(), map.labels.end(), r.id);
    const auto k = static_cast<int>(it - map.labels.begin());
    const double t2 = -pi + (k % n) * (2.0 * pi / n), t3 = -pi + (k / n) * (2.0 * pi / n);
    svg.text(t2, t3, fmt::format("R{}.{} ({})", r.aspect + 1, r.id, r.ik_count));
  }
  svg.axes("theta2 (rad)", "theta3 (rad)");
  return svg.str();
}

std::string uniqueness_domain_svg(const ReducedAspectMap& map, const UniquenessDomain& domain) {
  const double pi = std::numbers::pi;
  SvgCanvas svg(-pi, pi, -pi, pi);
  shade_torus(svg, map.aspects.resolution, [&](std::size_t k) {
    const int label = map.labels[k];
    if (label < 0) return std::string();
    if (std::find(domain.retained.begin(), domain.retained.end(), label) != domain.retained.end())
      return tint(domain.aspect);
    return std::string();
  });
  svg.axes("theta2 (rad)", "theta3 (rad)");
  return svg.str();
}

std::string feasible_region_svg(const ManipulatorModel& model, const SingularAnalysis& analysis,
                                const WorkspaceRaster& raster, const FeasibleRegion& region) {
  const double L = model.length_scale();
  SvgCanvas svg(0.0, L, -L, L, 420);
  shade_raster(svg, raster, &region.cells);
  draw_boundaries(svg, analysis);
  for (const auto& w : region.walls) svg.dot(w.rho, w.z, 1.8, "#d62728");
  svg.axes("rho", "z");
  return svg.str();
}

std::string parameter_space_svg(double a1, double d2, double a2_max, double a3_max, bool with_nodes,
                                const std::vector<std::pair<double, Bifurcation>>& oracle) {
  SvgCanvas svg(0.0, a2_max, 0.0, a3_max, 560);
  constexpr int kSamples = 400;
  std::vector<std::vector<std::pair<double, double>>> c1(1), c2(1), c3(1), c4(1), e1(1), e2(1), e3(1);
  auto add = [&](std::vector<std::vector<std::pair<double, double>>>& line, double a2, std::optional<double> v) {
    if (v && *v <= a3_max) {
      line.back().emplace_back(a2, *v);
    } else if (!line.back().empty()) {
      line.emplace_back();
    }
  };
  for (int k = 1; k <= kSamples; ++k) {
    const double a2 = a2_max * k / kSamples;
    const SurfaceValues s = surface_values(a1, a2, d2);
    add(c1, a2, s.C1);
    add(c2, a2, s.C2);
    add(c3, a2, s.C3);
    add(c4, a2, s.C4);
    if (with_nodes) {
      add(e1, a2, s.E1);
      add(e2, a2, s.E2);
      add(e3, a2, s.E3);
    }
  }
  auto draw = [&](const auto& line, const std::string& color, const std::string& name) {
    for (const auto& piece : line) svg.polyline(piece, color, 2.0);
    for (auto it = line.rbegin(); it != line.rend(); ++it) {
      if (it->empty()) continue;
      svg.text(it->back().first, it->back().second, name);
      break;
    }
  };
  draw(c1, palette(0), "C1");
  draw(c2, palette(1), "C2");
  draw(c3, palette(2), "C3");
  draw(c4, palette(3), "C4");
  if (with_nodes) {
    draw(e1, palette(4), "E1");
    draw(e2, palette(5), "E2");
    draw(e3, palette(6), "E3");
  }
  for (const auto& [a2, b] : oracle) svg.circle(a2, b.a3, 3.0, "#000000");
  svg.axes("a2", "a3");
  return svg.str();
}

std::string curves_csv(const SingularAnalysis& analysis) {
  std::string out = "branch_id,s,theta2,theta3,rho,z\n";
  for (std::size_t c = 0; c < analysis.curves.size(); ++c) {
    const SingularCurve& curve = analysis.curves[c];
    const BoundaryCurve& b = analysis.boundaries[c];
    std::vector<double> s(curve.vertices.size(), 0.0);
    for (std::size_t k = 1; k < s.size(); ++k) {
      const auto& p = curve.vertices[k - 1];
      const auto& q = curve.vertices[k];
      s[k] = s[k - 1] + std::hypot(angle_difference(p.theta2, q.theta2), angle_difference(p.theta3, q.theta3));
    }
    const double total = s.empty() || s.back() == 0.0 ? 1.0 : s.back();
    for (std::size_t k = 0; k < s.size(); ++k) {
      out += fmt::format("{},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f}\n", curve.branch_id, s[k] / total,
                         curve.vertices[k].theta2, curve.vertices[k].theta3, b.points[k].rho, b.points[k].z);
    }
  }
  return out;
}

std::string cusps_csv(const SingularAnalysis& analysis) {
  std::string out = "id,branch_id,theta2,theta3,rho,z,residual_p,residual_dp,residual_ddp\n";
  int id = 0;
  for (const CuspPoint& c : analysis.cusps.cusps) {
    out += fmt::format("{},{},{:.9f},{:.9f},{:.9f},{:.9f},{:.3e},{:.3e},{:.3e}\n", id++, c.branch_id,
                       c.source.theta2, c.source.theta3, c.location.rho, c.location.z, c.residuals[0],
                       c.residuals[1], c.residuals[2]);
  }
  return out;
}

std::string nodes_csv(const SingularAnalysis& analysis) {
  std::string out = "id,first_branch,second_branch,rho,z,crossing_sine\n";
  int id = 0;
  for (const NodePoint& n : analysis.nodes.nodes) {
    out += fmt::format("{},{},{},{:.9f},{:.9f},{:.6f}\n", id++, n.first_branch, n.second_branch, n.location.rho,
                       n.location.z, n.crossing_sine);
  }
  return out;
}

std::string scan_csv(double a1, double d2, double a2, const std::vector<Bifurcation>& boundaries) {
  std::string out = "a1,d2,a2,a3,cusps_below,cusps_above\n";
  for (const Bifurcation& b : boundaries) {
    out += fmt::format("{:.6g},{:.6g},{:.6g},{:.6f},{},{}\n", a1, d2, a2, b.a3, b.cusps_below, b.cusps_above);
  }
  return out;
}

std::string path_csv(const PostureChange& change) {
  std::string out = "s,theta1,theta2,theta3,rho,z\n";
  const std::size_t n = change.path.size();
  for (std::size_t k = 0; k < n; ++k) {
    const JointConfig& q = change.path[k];
    out += fmt::format("{:.6f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f}\n", n > 1 ? static_cast<double>(k) / (n - 1) : 0.0,
                       q.theta1, q.theta2, q.theta3, change.loop[k].rho, change.loop[k].z);
  }
  return out;
}

std::string mesh_obj(const Mesh& mesh) {
  std::string out = "# rho z cos(theta2)\n";
  for (const auto& v : mesh.vertices) out += fmt::format("v {:.9f} {:.9f} {:.9f}\n", v.x(), v.y(), v.z());
  for (const auto& t : mesh.triangles) out += fmt::format("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
  return out;
}

}  // namespace cuspidal
