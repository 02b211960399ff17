#include "cuspidal/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "cuspidal/errors.hpp"
#include "cuspidal/ik.hpp"

namespace cuspidal {

namespace {

constexpr int kDilation = 2;
constexpr int kMembershipRings = 6;
constexpr int kMaxDomainsPerAspect = 64;
// Components smaller than N^2 / kSpeckleFraction are merged into the mask.
constexpr std::size_t kSpeckleFraction = 1000;
// |det J| below this on the unit-length chain counts as singular.
constexpr double kUnitSingular = 1e-9;
constexpr double kCharacteristicSingular = 1e-6;

ManipulatorModel unit_of(const ManipulatorModel& model) { return scaled(model, 1.0 / model.length_scale()); }

double node_theta(int n, int index) { return -std::numbers::pi + index * (2.0 * std::numbers::pi / n); }

int wrap_index(int n, int v) { return ((v % n) + n) % n; }

int majority(const std::map<int, std::size_t>& votes) {
  int best = -1;
  std::size_t count = 0;
  for (const auto& [key, n] : votes) {
    if (n > count) {
      best = key;
      count = n;
    }
  }
  return best;
}

double joint_distance(const JointConfig& a, const JointConfig& b) {
  return std::max({std::abs(angle_difference(a.theta1, b.theta1)), std::abs(angle_difference(a.theta2, b.theta2)),
                   std::abs(angle_difference(a.theta3, b.theta3))});
}

int total_count(const std::vector<IKSolution>& sols) {
  int total = 0;
  for (const auto& s : sols) total += s.multiplicity;
  return total;
}

}  // namespace

std::size_t CharacteristicSurfaceSet::size() const {
  std::size_t total = 0;
  for (const auto& a : per_aspect) total += a.size();
  return total;
}

CharacteristicSurfaceSet characteristic_surfaces(const ManipulatorModel& model, const SingularAnalysis& analysis) {
  const ManipulatorModel unit = unit_of(model);
  CharacteristicSurfaceSet out;
  out.per_aspect.resize(static_cast<std::size_t>(analysis.aspects.count));
  for (const BoundaryCurve& b : analysis.boundaries) {
    if (b.isolated_point) continue;
    std::vector<std::vector<CharacteristicPoint>> found(b.points.size());
    parallel_for(b.points.size(), [&](std::size_t k) {
      const CrossSectionPoint& c = b.points[k];
      for (const IKSolution& s : solve_ik(model, {c.rho, 0.0, c.z})) {
        if (s.multiplicity > 1) continue;
        if (std::abs(det_jacobian(unit, s.config.theta2, s.config.theta3)) <= kCharacteristicSingular) continue;
        const int a = analysis.aspects.aspect_of(model, s.config.theta2, s.config.theta3);
        if (a < 0) continue;
        found[k].push_back({{s.config.theta2, s.config.theta3}, a, c, b.branch_id});
      }
    });
    for (const auto& pts : found) {
      for (const auto& p : pts) out.per_aspect[static_cast<std::size_t>(p.aspect)].push_back(p);
    }
  }
  return out;
}

CharacteristicSurfaceSet characteristic_surfaces(const ManipulatorModel& model, int n) {
  return characteristic_surfaces(model, analyze_singularities(model, n));
}

std::vector<int> ReducedAspectMap::of_aspect(int aspect) const {
  std::vector<int> ids;
  for (const auto& r : reduced)
    if (r.aspect == aspect) ids.push_back(r.id);
  return ids;
}

int ReducedAspectMap::reduced_aspect_of(const ManipulatorModel& model, const TorusPoint& q, int ik_count) const {
  const int a = aspects.aspect_of(model, q.theta2, q.theta3);
  if (a < 0) return -1;
  const int n = aspects.resolution;
  const double step = 2.0 * std::numbers::pi / n;
  const int ci = static_cast<int>(std::lround((wrap_angle(q.theta2) + std::numbers::pi) / step));
  const int cj = static_cast<int>(std::lround((wrap_angle(q.theta3) + std::numbers::pi) / step));
  for (int ring = 0; ring <= kMembershipRings; ++ring) {
    for (int dj = -ring; dj <= ring; ++dj) {
      for (int di = -ring; di <= ring; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
        const int label = labels[static_cast<std::size_t>(wrap_index(n, cj + dj) * n + wrap_index(n, ci + di))];
        if (label < 0) continue;
        const ReducedAspect& r = reduced[static_cast<std::size_t>(label)];
        if (r.aspect == a && r.ik_count == ik_count) return label;
      }
    }
  }
  return -1;
}

ReducedAspectMap reduced_aspects(const ManipulatorModel& model, const AspectMap& aspects,
                                 const WorkspaceRaster& raster) {
  const int n = aspects.resolution;
  const std::size_t size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  ReducedAspectMap map;
  map.aspects = aspects;
  map.counts.assign(size, 0);
  std::vector<int> regions(size, -1);
  const Labeling raster_labels = raster_regions(raster);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int i = 0; i < n; ++i) {
      const WorkspacePoint p = forward(model, {0.0, node_theta(n, i), node_theta(n, static_cast<int>(j))});
      const std::size_t k = j * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      map.counts[k] = count_ik(model, p).total();
      const auto [ix, iz] = raster.cell_of(cross_section(p));
      regions[k] = raster_labels.labels[static_cast<std::size_t>(iz * raster.columns() + ix)];
    }
  });

  const auto& aspect = aspects.labels;
  std::vector<char> surface(size, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j * n + i);
      const std::size_t nbs[2] = {static_cast<std::size_t>(j * n + wrap_index(n, i + 1)),
                                  static_cast<std::size_t>(wrap_index(n, j + 1) * n + i)};
      for (std::size_t m : nbs) {
        if (aspect[k] == aspect[m] && map.counts[k] != map.counts[m]) surface[k] = surface[m] = 1;
      }
    }
  }
  std::vector<char> masked(size, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!surface[static_cast<std::size_t>(j * n + i)]) continue;
      for (int dj = -kDilation; dj <= kDilation; ++dj)
        for (int di = -kDilation; di <= kDilation; ++di)
          masked[static_cast<std::size_t>(wrap_index(n, j + dj) * n + wrap_index(n, i + di))] = 1;
    }
  }

  map.labels.assign(size, -1);
  std::vector<char> visited(size, 0);
  std::vector<int> stack, members;
  for (std::size_t seed = 0; seed < size; ++seed) {
    if (masked[seed] || visited[seed]) continue;
    const int id = static_cast<int>(map.reduced.size());
    ReducedAspect r;
    r.id = id;
    r.aspect = aspect[seed];
    std::map<int, std::size_t> count_votes, region_votes;
    visited[seed] = 1;
    stack.push_back(static_cast<int>(seed));
    members.clear();
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      ++r.nodes;
      ++count_votes[map.counts[static_cast<std::size_t>(cur)]];
      ++region_votes[regions[static_cast<std::size_t>(cur)]];
      const int i = cur % n, j = cur / n;
      const int nb[4] = {j * n + wrap_index(n, i + 1), j * n + wrap_index(n, i - 1), wrap_index(n, j + 1) * n + i,
                         wrap_index(n, j - 1) * n + i};
      for (int m : nb) {
        const auto um = static_cast<std::size_t>(m);
        if (masked[um] || visited[um] || aspect[um] != r.aspect) continue;
        visited[um] = 1;
        stack.push_back(m);
      }
    }
    if (r.nodes * kSpeckleFraction < size) continue;
    for (int k : members) map.labels[static_cast<std::size_t>(k)] = id;
    r.ik_count = majority(count_votes);
    r.region = majority(region_votes);
    map.reduced.push_back(r);
  }

  if (model.closed_form_determinant()) {
    for (int a = 0; a < aspects.count; ++a) {
      const std::size_t k = map.of_aspect(a).size();
      if (k > 3) {
        map.fragmentation_warning =
            fmt::format("aspect {} splits into {} reduced aspects; raise the resolution", a, k);
        break;
      }
    }
  }
  return map;
}

ReducedAspectMap reduced_aspects(const ManipulatorModel& model, int n) {
  return reduced_aspects(model, compute_aspects(model, n), WorkspaceRaster(model));
}

bool UniquenessDomain::contains(const ReducedAspectMap& map, const ManipulatorModel& model, const TorusPoint& q,
                                int ik_count) const {
  const int r = map.reduced_aspect_of(model, q, ik_count);
  return r >= 0 && std::find(retained.begin(), retained.end(), r) != retained.end();
}

std::vector<UniquenessDomain> uniqueness_domains(const ReducedAspectMap& map) {
  std::vector<UniquenessDomain> out;
  for (int a = 0; a < map.aspects.count; ++a) {
    std::map<int, std::vector<int>> by_region;
    for (int id : map.of_aspect(a)) by_region[map.reduced[static_cast<std::size_t>(id)].region].push_back(id);
    std::vector<std::vector<int>> groups;
    for (auto& [region, ids] : by_region) groups.push_back(ids);
    std::size_t choices = 1;
    for (const auto& g : groups) choices = std::min<std::size_t>(choices * g.size(), kMaxDomainsPerAspect);
    for (std::size_t c = 0; c < choices; ++c) {
      UniquenessDomain d;
      d.id = static_cast<int>(out.size());
      d.aspect = a;
      std::size_t rest = c;
      for (const auto& g : groups) {
        const std::size_t keep = rest % g.size();
        rest /= g.size();
        for (std::size_t k = 0; k < g.size(); ++k) (k == keep ? d.retained : d.deleted).push_back(g[k]);
      }
      std::sort(d.retained.begin(), d.retained.end());
      std::sort(d.deleted.begin(), d.deleted.end());
      out.push_back(std::move(d));
    }
  }
  return out;
}

namespace {

struct ImageCells {
  std::vector<FeasibleRegion> regions;
  std::vector<std::vector<char>> aspects;
};

// Reduced aspects of the given aspect labelling nodes near q.
std::vector<int> bordering(const ReducedAspectMap& map, const TorusPoint& q, int aspect) {
  const int n = map.aspects.resolution;
  const double step = 2.0 * std::numbers::pi / n;
  const int ci = static_cast<int>(std::lround((wrap_angle(q.theta2) + std::numbers::pi) / step));
  const int cj = static_cast<int>(std::lround((wrap_angle(q.theta3) + std::numbers::pi) / step));
  const int reach = kDilation + 2;
  std::vector<int> out;
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const int label = map.labels[static_cast<std::size_t>(wrap_index(n, cj + dj) * n + wrap_index(n, ci + di))];
      if (label < 0 || map.reduced[static_cast<std::size_t>(label)].aspect != aspect) continue;
      if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
    }
  }
  return out;
}

ImageCells image_cells(const ManipulatorModel& model, const ReducedAspectMap& map,
                       const std::vector<UniquenessDomain>& domains, const WorkspaceRaster& raster,
                       const CharacteristicSurfaceSet& surfaces) {
  const std::size_t cells = static_cast<std::size_t>(raster.columns()) * static_cast<std::size_t>(raster.rows());
  ImageCells out;
  for (const auto& d : domains) out.regions.push_back({d.id, d.aspect, std::vector<char>(cells, 0), 0, {}});
  out.aspects.assign(static_cast<std::size_t>(map.aspects.count), std::vector<char>(cells, 0));
  parallel_for(static_cast<std::size_t>(raster.rows()), [&](std::size_t iz) {
    for (int ix = 0; ix < raster.columns(); ++ix) {
      if (raster.count(ix, static_cast<int>(iz)) == 0) continue;
      const std::size_t k = iz * static_cast<std::size_t>(raster.columns()) + static_cast<std::size_t>(ix);
      const CrossSectionPoint c = raster.centre(ix, static_cast<int>(iz));
      const std::vector<IKSolution> sols = solve_ik(model, {c.rho, 0.0, c.z});
      const int total = total_count(sols);
      for (const IKSolution& s : sols) {
        const TorusPoint q{s.config.theta2, s.config.theta3};
        const int a = map.aspects.aspect_of(model, q.theta2, q.theta3);
        if (a >= 0) out.aspects[static_cast<std::size_t>(a)][k] = 1;
        const int r = map.reduced_aspect_of(model, q, total);
        if (r < 0) continue;
        for (auto& region : out.regions) {
          const auto& d = domains[static_cast<std::size_t>(region.domain)];
          if (std::find(d.retained.begin(), d.retained.end(), r) != d.retained.end()) region.cells[k] = 1;
        }
      }
    }
  });
  for (auto& region : out.regions) {
    region.cell_count = static_cast<std::size_t>(std::count(region.cells.begin(), region.cells.end(), 1));
    const auto& d = domains[static_cast<std::size_t>(region.domain)];
    if (static_cast<std::size_t>(d.aspect) >= surfaces.per_aspect.size()) continue;
    for (const CharacteristicPoint& c : surfaces.per_aspect[static_cast<std::size_t>(d.aspect)]) {
      for (int r : bordering(map, c.q, d.aspect)) {
        if (std::find(d.deleted.begin(), d.deleted.end(), r) != d.deleted.end()) {
          region.walls.push_back(c.image);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<FeasibleRegion> feasible_regions(const ManipulatorModel& model, const ReducedAspectMap& map,
                                             const std::vector<UniquenessDomain>& domains,
                                             const WorkspaceRaster& raster,
                                             const CharacteristicSurfaceSet& surfaces) {
  return image_cells(model, map, domains, raster, surfaces).regions;
}

FeasibilityAnalysis analyze_feasibility(const ManipulatorModel& model, int n) {
  SingularAnalysis singular = analyze_singularities(model);
  CharacteristicSurfaceSet surfaces = characteristic_surfaces(model, singular);
  WorkspaceRaster raster(model);
  ReducedAspectMap reduced = reduced_aspects(model, compute_aspects(model, n), raster);
  std::vector<UniquenessDomain> domains = uniqueness_domains(reduced);
  ImageCells images = image_cells(model, reduced, domains, raster, surfaces);
  return {std::move(singular), std::move(surfaces), std::move(reduced),          std::move(domains),
          std::move(raster),   std::move(images.regions), std::move(images.aspects)};
}

Mesh level_set_surface(const ManipulatorModel& model, const AspectMap& aspects, int aspect, int cells_across) {
  const ManipulatorModel unit = unit_of(model);
  const int n = aspects.resolution;
  const int stride = std::max(1, n / std::max(1, cells_across));
  const int m = n / stride;
  Mesh mesh;
  std::vector<int> index(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), -1);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int gi = i * stride, gj = j * stride;
      if (aspects.labels[static_cast<std::size_t>(gj * n + gi)] != aspect) continue;
      const double t2 = node_theta(n, gi), t3 = node_theta(n, gj);
      if (std::abs(det_jacobian(unit, t2, t3)) <= kUnitSingular) continue;
      const Eigen::Vector3d p = arm_point(model, t2, t3).position;
      index[static_cast<std::size_t>(j * m + i)] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.emplace_back(std::hypot(p.x(), p.y()), p.z(), std::cos(t2));
    }
  }
  auto at = [&](int i, int j) { return index[static_cast<std::size_t>(wrap_index(m, j) * m + wrap_index(m, i))]; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
      if (v00 >= 0 && v10 >= 0 && v11 >= 0) mesh.triangles.push_back({v00, v10, v11});
      if (v00 >= 0 && v11 >= 0 && v01 >= 0) mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

bool encloses(const std::vector<CrossSectionPoint>& polygon, const CrossSectionPoint& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.z > p.z) != (b.z > p.z) && p.rho < (b.rho - a.rho) * (p.z - a.z) / (b.z - a.z) + a.rho) inside = !inside;
  }
  return inside;
}

int winding_number(const std::vector<CrossSectionPoint>& polygon, const CrossSectionPoint& p) {
  int wn = 0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    const double cross = (b.rho - a.rho) * (p.z - a.z) - (p.rho - a.rho) * (b.z - a.z);
    if (a.z <= p.z) {
      if (b.z > p.z && cross > 0) ++wn;
    } else if (b.z <= p.z && cross < 0) {
      --wn;
    }
  }
  return wn;
}

PostureChange plan_posture_change(const ManipulatorModel& model, const WorkspacePoint& p, int i, int j,
                                  const AspectMap& aspects, const std::vector<CuspPoint>& cusps) {
  const std::vector<IKSolution> sols = solve_ik(model, p);
  const int count = static_cast<int>(sols.size());
  if (i < 0 || j < 0 || i >= count || j >= count || i == j) {
    throw AnalysisError(ErrorKind::InvalidParams,
                        fmt::format("solution indices {} and {} must differ and lie in [0, {})", i, j, count));
  }
  PostureChange out;
  out.start = sols[static_cast<std::size_t>(i)].config;
  out.goal = sols[static_cast<std::size_t>(j)].config;
  const int ai = aspects.aspect_of(model, out.start.theta2, out.start.theta3);
  const int aj = aspects.aspect_of(model, out.goal.theta2, out.goal.theta3);
  if (ai < 0 || ai != aj) {
    throw AnalysisError(ErrorKind::DifferentAspects,
                        fmt::format("solutions {} and {} lie in aspects {} and {}", i, j, ai, aj));
  }
  out.aspect = ai;

  const double d1 = angle_difference(out.start.theta1, out.goal.theta1);
  const double d2 = angle_difference(out.start.theta2, out.goal.theta2);
  const double d3 = angle_difference(out.start.theta3, out.goal.theta3);
  const double eps = kUnitSingular * std::pow(model.length_scale(), 3);
  out.min_det = std::numeric_limits<double>::infinity();
  double first_sign = 0.0;
  bool sign_change = false;
  for (int k = 0; k <= kPostureSamples; ++k) {
    const double s = static_cast<double>(k) / kPostureSamples;
    const JointConfig q = JointConfig{out.start.theta1 + s * d1, out.start.theta2 + s * d2, out.start.theta3 + s * d3}
                              .normalized();
    out.path.push_back(q);
    const double det = det_jacobian(model, q.theta2, q.theta3);
    out.min_det = std::min(out.min_det, std::abs(det));
    if (k == 0) first_sign = det;
    if (det * first_sign < 0.0) sign_change = true;
    out.loop.push_back(cross_section(forward(model, q)));
  }
  if (out.min_det <= eps || sign_change) {
    throw AnalysisError(ErrorKind::SingularPath,
                        fmt::format("straight line from {} to {} meets a singularity (min |det J| = {:.3e})", i, j,
                                    sign_change ? 0.0 : out.min_det));
  }
  for (std::size_t c = 0; c < cusps.size(); ++c) {
    out.winding.push_back(winding_number(out.loop, cusps[c].location));
    if (encloses(out.loop, cusps[c].location)) out.enclosed_cusps.push_back(static_cast<int>(c));
  }
  return out;
}

PostureChange plan_posture_change(const ManipulatorModel& model, const WorkspacePoint& p, int i, int j) {
  const SingularAnalysis a = analyze_singularities(model);
  return plan_posture_change(model, p, i, j, a.aspects, a.cusps.cusps);
}

PathCheck check_path_feasibility(const ManipulatorModel& model, const std::vector<CrossSectionPoint>& path,
                                 int start_branch) {
  if (path.empty()) throw AnalysisError(ErrorKind::InvalidParams, "path has no vertices");
  const std::vector<IKSolution> start = solve_ik(model, {path.front().rho, 0.0, path.front().z});
  if (start.empty()) throw AnalysisError(ErrorKind::StartUnreachable, "no inverse kinematic solution at path start");
  if (start_branch < 0 || start_branch >= static_cast<int>(start.size())) {
    throw AnalysisError(ErrorKind::InvalidParams,
                        fmt::format("branch {} outside [0, {})", start_branch, start.size()));
  }
  const ManipulatorModel unit = unit_of(model);
  auto det_sign = [&](const JointConfig& q) {
    const double d = det_jacobian(unit, q.theta2, q.theta3);
    return std::abs(d) <= kUnitSingular ? 0 : (d > 0 ? 1 : -1);
  };
  PathCheck out;
  JointConfig cur = start[static_cast<std::size_t>(start_branch)].config;
  const int sign = det_sign(cur);
  out.configs.push_back(cur);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const CrossSectionPoint a = path[k], b = path[k + 1];
    double s = 0.0, ds = 1.0;
    while (s < 1.0) {
      ds = std::min(ds, 1.0 - s);
      const double t = s + ds;
      const CrossSectionPoint c{a.rho + t * (b.rho - a.rho), a.z + t * (b.z - a.z)};
      std::optional<JointConfig> next;
      double best = kBranchStep;
      for (const IKSolution& sol : solve_ik(model, {c.rho, 0.0, c.z})) {
        const double dist = joint_distance(cur, sol.config);
        if (dist < best) {
          best = dist;
          next = sol.config;
        }
      }
      if (next && det_sign(*next) == sign && sign != 0) {
        cur = *next;
        s = t;
        ds = std::min(1.0, 2.0 * ds);
      } else {
        ds *= 0.5;
        if (ds < 1e-9) {
          out.feasible = false;
          out.failed_vertex = k;
          return out;
        }
      }
    }
    out.configs.push_back(cur);
  }
  return out;
}

}  // namespace cuspidal
