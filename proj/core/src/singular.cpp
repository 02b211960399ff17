#include "cuspidal/singular.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "cuspidal/errors.hpp"
#include "cuspidal/ik.hpp"
#include "cuspidal/polynomial.hpp"

namespace cuspidal {

namespace {

constexpr int kMinCurveVertices = 8;
constexpr int kMaxResolution = 8192;
constexpr double kGradientStep = 1e-6;
// Tolerances below apply to the chain scaled to unit length.
constexpr double kGenericGradient = 1e-3;
constexpr double kCuspTolerance = 1e-8;
constexpr double kTransversalSine = 1e-3;
constexpr int kNodeIndexSeparation = 10;

ManipulatorModel unit_model(const ManipulatorModel& model) {
  return scaled(model, 1.0 / model.length_scale());
}

Eigen::Vector2d to_vec(const TorusPoint& p) { return {p.theta2, p.theta3}; }
TorusPoint to_point(const Eigen::Vector2d& v) { return {wrap_angle(v.x()), wrap_angle(v.y())}; }

// v relative to ref on the torus, unwrapped next to ref.
Eigen::Vector2d unwrap_near(const TorusPoint& p, const Eigen::Vector2d& ref) {
  return {ref.x() + angle_difference(ref.x(), p.theta2), ref.y() + angle_difference(ref.y(), p.theta3)};
}

Eigen::Vector2d gradient(const ManipulatorModel& m, CurveSource src, double t2, double t3) {
  const double h = kGradientStep;
  return {(singular_field(m, src, t2 + h, t3) - singular_field(m, src, t2 - h, t3)) / (2.0 * h),
          (singular_field(m, src, t2, t3 + h) - singular_field(m, src, t2, t3 - h)) / (2.0 * h)};
}

// (theta2, theta3) part of the null vector of J at theta1 = 0, taken from the
// largest adjugate column. Also returns the full null-vector norm.
Eigen::Vector2d kernel_direction(const ManipulatorModel& m, double t2, double t3, double* full_norm) {
  const ArmPoint arm = arm_point(m, t2, t3);
  Eigen::Matrix3d j;
  j.col(0) = Eigen::Vector3d(-arm.position.y(), arm.position.x(), 0.0);
  j.col(1) = arm.d_theta2;
  j.col(2) = arm.d_theta3;
  const Eigen::Vector3d r0 = j.row(0), r1 = j.row(1), r2 = j.row(2);
  Eigen::Vector3d best = r1.cross(r2);
  for (const Eigen::Vector3d& c : {Eigen::Vector3d(r2.cross(r0)), Eigen::Vector3d(r0.cross(r1))})
    if (c.norm() > best.norm()) best = c;
  if (full_norm) *full_norm = best.norm();
  return {best.y(), best.z()};
}

CrossSectionPoint image(const ManipulatorModel& m, double t2, double t3) {
  const Eigen::Vector3d h = arm_point(m, t2, t3).position;
  return {std::hypot(h.x(), h.y()), h.z()};
}

// Cosine between the field gradient and the oriented kernel; zero at a cusp.
double cusp_function(const ManipulatorModel& m, CurveSource src, const Eigen::Vector2d& q,
                     const Eigen::Vector2d& kernel_ref, Eigen::Vector2d* kernel_out = nullptr) {
  Eigen::Vector2d k = kernel_direction(m, q.x(), q.y(), nullptr);
  if (k.dot(kernel_ref) < 0.0) k = -k;
  if (kernel_out) *kernel_out = k;
  const Eigen::Vector2d g = gradient(m, src, q.x(), q.y());
  const double denom = g.norm() * k.norm();
  return denom > 0.0 ? g.dot(k) / denom : 0.0;
}

struct CuspRefinement {
  bool converged = false;
  Eigen::Vector2d q;
};

CuspRefinement refine_cusp_on_torus(const ManipulatorModel& m, CurveSource src, Eigen::Vector2d q,
                                    const Eigen::Vector2d& kernel_ref) {
  const double gscale = std::max(gradient(m, src, q.x(), q.y()).norm(), 1e-12);
  auto residual = [&](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(singular_field(m, src, x.x(), x.y()) / gscale, cusp_function(m, src, x, kernel_ref));
  };
  const Eigen::Vector2d seed = q;
  Eigen::Vector2d r = residual(q);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(r.x()) < 1e-13 && std::abs(r.y()) < 1e-10) return {true, q};
    Eigen::Matrix2d jac;
    const double h = 1e-7;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[c] = h;
      jac.col(c) = (residual(q + e) - residual(q - e)) / (2.0 * h);
    }
    const Eigen::Vector2d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 20; ++k, lambda *= 0.5) {
      const Eigen::Vector2d trial = q + lambda * step;
      const Eigen::Vector2d rt = residual(trial);
      if (rt.norm() < r.norm()) {
        q = trial;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
    if ((q - seed).norm() > 0.05) break;
  }
  const bool ok = std::abs(r.x()) < 1e-10 && std::abs(r.y()) < 1e-8 && (q - seed).norm() <= 0.05;
  return {ok, q};
}

// Newton on P = P' = P'' = 0 in (t, R, Z); |t| > 1 works on the reversed
// polynomial in 1/t.
struct TripleRoot {
  bool converged = false;
  double t = 0.0, R = 0.0, Z = 0.0;
  std::array<double, 3> residuals{};
};

TripleRoot polish_triple_root(const ManipulatorModel& m, double theta3, double R, double Z) {
  const bool reversed = std::abs(std::tan(theta3 / 2.0)) > 1.0;
  double x = reversed ? 1.0 / std::tan(theta3 / 2.0) : std::tan(theta3 / 2.0);
  if (!std::isfinite(x)) x = 0.0;

  auto coeffs = [&](double r, double z) {
    QuarticCoefficients c = quartic_coefficients(m, {r, z, 0});
    if (reversed) std::reverse(c.begin(), c.end());
    return c;
  };
  auto eval = [&](double xx, double r, double z, std::array<double, 3>* res) {
    const QuarticCoefficients c = coeffs(r, z);
    const double norm = poly_norm(c);
    Eigen::Vector3d f;
    for (int k = 0; k < 3; ++k) f[k] = poly_eval(c, xx, k) / norm;
    if (res)
      for (int k = 0; k < 3; ++k) (*res)[static_cast<std::size_t>(k)] = std::abs(f[k]);
    return f;
  };

  Eigen::Vector3d f = eval(x, R, Z, nullptr);
  for (int it = 0; it < 50 && f.norm() > 1e-15; ++it) {
    const QuarticCoefficients c = coeffs(R, Z);
    const double norm = poly_norm(c);
    QuarticSensitivity s = quartic_sensitivity(m, R, Z);
    if (reversed) {
      std::reverse(s.d_R.begin(), s.d_R.end());
      std::reverse(s.d_Z.begin(), s.d_Z.end());
    }
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
      jac(k, 0) = poly_eval(c, x, k + 1) / norm;
      jac(k, 1) = poly_eval(s.d_R, x, k) / norm;
      jac(k, 2) = poly_eval(s.d_Z, x, k) / norm;
    }
    const Eigen::Vector3d step = jac.fullPivLu().solve(-f);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const double xt = x + lambda * step[0], rt = R + lambda * step[1], zt = Z + lambda * step[2];
      const Eigen::Vector3d ft = eval(xt, rt, zt, nullptr);
      if (ft.norm() < f.norm()) {
        x = xt;
        R = rt;
        Z = zt;
        f = ft;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  TripleRoot out;
  eval(x, R, Z, &out.residuals);
  out.R = R;
  out.Z = Z;
  out.t = reversed ? (x == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / x) : x;
  out.converged = *std::max_element(out.residuals.begin(), out.residuals.end()) < kCuspTolerance;
  return out;
}

bool has_quartic(const ManipulatorModel& m) {
  return m.orthogonal() && m.params().a1 > 0.0 && !m.length_is_zero(m.params().a1);
}

bool collapses_to_point(const ManipulatorModel& m, const SingularCurve& curve) {
  return curve.source == CurveSource::FirstFactor && m.length_is_zero(m.params().d3);
}

}  // namespace

double singular_field(const ManipulatorModel& model, CurveSource source, double theta2, double theta3) {
  switch (source) {
    case CurveSource::FirstFactor:
      return det_first_factor(model, theta3);
    case CurveSource::SecondFactor:
      return det_second_factor(model, theta2, theta3);
    case CurveSource::Determinant:
      break;
  }
  return det_jacobian(model, theta2, theta3);
}

std::vector<SingularCurve> trace_singular_curves(const ManipulatorModel& model, int n) {
  if (n < 64) throw AnalysisError(ErrorKind::InvalidParams, "grid resolution must be at least 64");
  const ManipulatorModel unit = unit_model(model);
  std::vector<CurveSource> sources;
  if (unit.closed_form_determinant())
    sources = {CurveSource::FirstFactor, CurveSource::SecondFactor};
  else
    sources = {CurveSource::Determinant};

  std::vector<SingularCurve> curves;
  for (CurveSource src : sources) {
    const TorusGrid grid(n, [&](double t2, double t3) { return singular_field(unit, src, t2, t3); });
    for (ContourLoop& loop : extract_contours(grid)) {
      if (static_cast<int>(loop.vertices.size()) < kMinCurveVertices)
        throw AnalysisError(ErrorKind::ResolutionTooLow,
                            "singular curve with " + std::to_string(loop.vertices.size()) +
                                " vertices at N=" + std::to_string(n));
      SingularCurve c;
      c.branch_id = static_cast<int>(curves.size());
      c.source = src;
      c.vertices = std::move(loop.vertices);
      c.closed = loop.closed;
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

AspectMap compute_aspects(const ManipulatorModel& model, int n) {
  const ManipulatorModel unit = unit_model(model);
  const TorusGrid grid(n, [&](double t2, double t3) { return det_jacobian_reduced(unit, t2, t3); });
  Labeling lab = label_sign_components(grid);
  AspectMap map;
  map.resolution = n;
  map.count = lab.count;
  map.signs.assign(static_cast<std::size_t>(lab.count), 0);
  for (std::size_t k = 0; k < lab.labels.size(); ++k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(n));
    const int j = static_cast<int>(k / static_cast<std::size_t>(n));
    map.signs[static_cast<std::size_t>(lab.labels[k])] = grid.at(i, j) > 0.0 ? 1 : -1;
  }
  map.labels = std::move(lab.labels);
  return map;
}

int AspectMap::aspect_of(const ManipulatorModel& model, double theta2, double theta3) const {
  const double value = det_jacobian_reduced(model, theta2, theta3);
  const int sign = value > 0.0 ? 1 : -1;
  const double step = 2.0 * std::numbers::pi / resolution;
  const int ci = static_cast<int>(std::lround((wrap_angle(theta2) + std::numbers::pi) / step));
  const int cj = static_cast<int>(std::lround((wrap_angle(theta3) + std::numbers::pi) / step));
  auto wrap = [&](int v) { return ((v % resolution) + resolution) % resolution; };
  for (int ring = 0; ring <= 2; ++ring) {
    for (int dj = -ring; dj <= ring; ++dj) {
      for (int di = -ring; di <= ring; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
        const int label = labels[static_cast<std::size_t>(wrap(cj + dj) * resolution + wrap(ci + di))];
        if (signs[static_cast<std::size_t>(label)] == sign) return label;
      }
    }
  }
  return -1;
}

BoundaryCurve map_boundary(const ManipulatorModel& model, const SingularCurve& curve) {
  BoundaryCurve b;
  b.branch_id = curve.branch_id;
  b.points.reserve(curve.vertices.size());
  for (const TorusPoint& v : curve.vertices) b.points.push_back(image(model, v.theta2, v.theta3));
  double extent = 0.0;
  for (const auto& p : b.points)
    extent = std::max(extent, std::hypot(p.rho - b.points.front().rho, p.z - b.points.front().z));
  b.isolated_point = extent < 1e-9 * model.length_scale();
  return b;
}

CuspSearch find_cusps(const ManipulatorModel& model, const std::vector<SingularCurve>& curves) {
  const ManipulatorModel unit = unit_model(model);
  const double L = model.length_scale();
  const bool quartic = has_quartic(unit);
  CuspSearch out;

  for (const SingularCurve& curve : curves) {
    if (collapses_to_point(unit, curve)) continue;
    const std::size_t nv = curve.vertices.size();
    std::vector<Eigen::Vector2d> grads(nv), kernels(nv);
    std::vector<double> kernel_share(nv);
    for (std::size_t k = 0; k < nv; ++k) {
      const TorusPoint& v = curve.vertices[k];
      grads[k] = gradient(unit, curve.source, v.theta2, v.theta3);
      double full = 0.0;
      kernels[k] = kernel_direction(unit, v.theta2, v.theta3, &full);
      kernel_share[k] = full > 0.0 ? kernels[k].norm() / full : 0.0;
    }
    const std::size_t pairs = curve.closed ? nv : nv - 1;
    for (std::size_t k = 0; k < pairs; ++k) {
      const std::size_t l = (k + 1) % nv;
      if (grads[k].norm() < kGenericGradient * 1e-3 || grads[l].norm() < kGenericGradient * 1e-3) continue;
      // Near the first axis the null vector is dominated by theta1.
      if (kernel_share[k] < 1e-3 || kernel_share[l] < 1e-3) continue;
      const Eigen::Vector2d kk = kernels[k];
      Eigen::Vector2d kl = kernels[l];
      if (kl.dot(kk) < 0.0) kl = -kl;
      const double ck = grads[k].dot(kk) / (grads[k].norm() * kk.norm());
      const double cl = grads[l].dot(kl) / (grads[l].norm() * kl.norm());
      if (ck * cl > 0.0) continue;

      const Eigen::Vector2d a = to_vec(curve.vertices[k]);
      const Eigen::Vector2d b = unwrap_near(curve.vertices[l], a);
      const CuspRefinement ref = refine_cusp_on_torus(unit, curve.source, 0.5 * (a + b), kk);
      const TorusPoint q = to_point(ref.q);
      CuspPoint cusp;
      cusp.branch_id = curve.branch_id;
      cusp.source = q;
      const CrossSectionPoint img = image(unit, q.theta2, q.theta3);
      cusp.location = {img.rho * L, img.z * L};
      cusp.t = std::abs(angle_difference(q.theta3, std::numbers::pi)) < 1e-15
                   ? std::numeric_limits<double>::infinity()
                   : std::tan(q.theta3 / 2.0);
      // Crossings of two singular branches also flip the kernel test.
      if (ref.converged && gradient(unit, curve.source, q.theta2, q.theta3).norm() < kGenericGradient) continue;
      bool accepted = ref.converged;
      if (accepted && quartic) {
        const double R = img.rho * img.rho, Z = img.z * img.z;
        const TripleRoot tr = polish_triple_root(unit, q.theta3, R, Z);
        cusp.residuals = tr.residuals;
        accepted = tr.converged && std::abs(tr.R - R) < 1e-6 && std::abs(tr.Z - Z) < 1e-6;
        if (accepted) {
          cusp.t = tr.t;
          cusp.location = {std::sqrt(std::max(tr.R, 0.0)) * L, std::copysign(std::sqrt(std::max(tr.Z, 0.0)), img.z) * L};
        }
      }
      (accepted ? out.cusps : out.nonconvergent).push_back(cusp);
    }
  }

  // Merge duplicates found from neighbouring vertex pairs.
  std::vector<CuspPoint> merged;
  for (const CuspPoint& c : out.cusps) {
    const bool dup = std::any_of(merged.begin(), merged.end(), [&](const CuspPoint& m) {
      return std::hypot(angle_difference(m.source.theta2, c.source.theta2),
                        angle_difference(m.source.theta3, c.source.theta3)) < 1e-6;
    });
    if (!dup) merged.push_back(c);
  }
  auto order = [](const CuspPoint& x, const CuspPoint& y) {
    return std::tie(x.location.z, x.location.rho) < std::tie(y.location.z, y.location.rho);
  };
  std::sort(merged.begin(), merged.end(), order);
  out.cusps = std::move(merged);
  return out;
}

CuspSearch find_cusps(const ManipulatorModel& model) {
  return analyze_singularities(model).cusps;
}

namespace {

struct Segment {
  std::size_t curve;
  std::size_t index;
  Eigen::Vector2d a, b;
};

double orient(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
  return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
}

struct NodeRefinement {
  bool converged = false;
  Eigen::Vector2d a, b;
};

NodeRefinement refine_node(const ManipulatorModel& m, CurveSource sa, CurveSource sb, Eigen::Vector2d a,
                           Eigen::Vector2d b) {
  const double ga = std::max(gradient(m, sa, a.x(), a.y()).norm(), 1e-12);
  const double gb = std::max(gradient(m, sb, b.x(), b.y()).norm(), 1e-12);
  auto residual = [&](const Eigen::Vector4d& x) {
    const Eigen::Vector3d pa = arm_point(m, x[0], x[1]).position;
    const Eigen::Vector3d pb = arm_point(m, x[2], x[3]).position;
    return Eigen::Vector4d(singular_field(m, sa, x[0], x[1]) / ga, singular_field(m, sb, x[2], x[3]) / gb,
                           pa.head<2>().squaredNorm() - pb.head<2>().squaredNorm(), pa.z() - pb.z());
  };
  Eigen::Vector4d x(a.x(), a.y(), b.x(), b.y());
  const Eigen::Vector4d seed = x;
  Eigen::Vector4d r = residual(x);
  for (int it = 0; it < 40 && r.norm() > 1e-14; ++it) {
    Eigen::Matrix4d jac;
    const double h = 1e-7;
    for (int c = 0; c < 4; ++c) {
      Eigen::Vector4d e = Eigen::Vector4d::Zero();
      e[c] = h;
      jac.col(c) = (residual(x + e) - residual(x - e)) / (2.0 * h);
    }
    const Eigen::Vector4d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 20; ++k, lambda *= 0.5) {
      const Eigen::Vector4d trial = x + lambda * step;
      const Eigen::Vector4d rt = residual(trial);
      if (rt.norm() < r.norm()) {
        x = trial;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  const bool ok = r.norm() < 1e-11 && (x - seed).norm() < 0.05;
  return {ok, x.head<2>(), x.tail<2>()};
}

Eigen::Vector2d image_tangent(const ManipulatorModel& m, CurveSource src, const Eigen::Vector2d& q) {
  const Eigen::Vector2d g = gradient(m, src, q.x(), q.y());
  const Eigen::Vector2d tau = Eigen::Vector2d(-g.y(), g.x()).normalized();
  const double h = 1e-6;
  const Eigen::Vector2d p = q + h * tau, n = q - h * tau;
  const CrossSectionPoint ip = image(m, p.x(), p.y()), in = image(m, n.x(), n.y());
  return Eigen::Vector2d(ip.rho - in.rho, ip.z - in.z) / (2.0 * h);
}

}  // namespace

NodeSearch find_nodes(const ManipulatorModel& model, const std::vector<SingularCurve>& curves) {
  const ManipulatorModel unit = unit_model(model);
  const double L = model.length_scale();

  std::vector<Segment> segs;
  std::vector<std::size_t> curve_size(curves.size(), 0);
  double max_len = 0.0;
  double lo_x = 1e300, lo_y = 1e300;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (collapses_to_point(unit, curves[c])) continue;
    const BoundaryCurve b = map_boundary(unit, curves[c]);
    if (b.isolated_point) continue;
    const std::size_t nv = b.points.size();
    curve_size[c] = nv;
    const std::size_t count = curves[c].closed ? nv : nv - 1;
    for (std::size_t k = 0; k < count; ++k) {
      const auto& p = b.points[k];
      const auto& q = b.points[(k + 1) % nv];
      Segment s{c, k, {p.rho, p.z}, {q.rho, q.z}};
      max_len = std::max(max_len, (s.b - s.a).norm());
      lo_x = std::min({lo_x, p.rho, q.rho});
      lo_y = std::min({lo_y, p.z, q.z});
      segs.push_back(s);
    }
  }
  NodeSearch out;
  if (segs.empty()) return out;

  const double cell = std::max(max_len, 1e-9);
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto& g = segs[s];
    const long x0 = static_cast<long>(std::floor((std::min(g.a.x(), g.b.x()) - lo_x) / cell));
    const long x1 = static_cast<long>(std::floor((std::max(g.a.x(), g.b.x()) - lo_x) / cell));
    const long y0 = static_cast<long>(std::floor((std::min(g.a.y(), g.b.y()) - lo_y) / cell));
    const long y1 = static_cast<long>(std::floor((std::max(g.a.y(), g.b.y()) - lo_y) / cell));
    for (long x = x0; x <= x1; ++x)
      for (long y = y0; y <= y1; ++y) buckets[{x, y}].push_back(s);
  }

  std::set<std::pair<std::size_t, std::size_t>> tested;
  std::vector<NodePoint> found;
  for (const auto& [key, list] : buckets) {
    for (std::size_t u = 0; u < list.size(); ++u) {
      for (std::size_t w = u + 1; w < list.size(); ++w) {
        const std::size_t i = std::min(list[u], list[w]), j = std::max(list[u], list[w]);
        if (!tested.insert({i, j}).second) continue;
        const Segment& s = segs[i];
        const Segment& t = segs[j];
        if (s.curve == t.curve) {
          const std::size_t n = curve_size[s.curve];
          const std::size_t d = s.index > t.index ? s.index - t.index : t.index - s.index;
          const std::size_t sep = curves[s.curve].closed ? std::min(d, n - d) : d;
          if (sep <= static_cast<std::size_t>(kNodeIndexSeparation)) continue;
        }
        const double o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
        const double o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
        if (o1 * o2 > 0.0 || o3 * o4 > 0.0) continue;
        if (o1 == 0.0 && o2 == 0.0) continue;
        const double u_param = o3 / (o3 - o4);
        const double v_param = o1 / (o1 - o2);
        if (!std::isfinite(u_param) || !std::isfinite(v_param)) continue;

        const SingularCurve& cs = curves[s.curve];
        const SingularCurve& ct = curves[t.curve];
        const Eigen::Vector2d sa = to_vec(cs.vertices[s.index]);
        const Eigen::Vector2d sb = unwrap_near(cs.vertices[(s.index + 1) % cs.vertices.size()], sa);
        const Eigen::Vector2d ta = to_vec(ct.vertices[t.index]);
        const Eigen::Vector2d tb = unwrap_near(ct.vertices[(t.index + 1) % ct.vertices.size()], ta);
        const Eigen::Vector2d qa = sa + u_param * (sb - sa);
        const Eigen::Vector2d qb = ta + v_param * (tb - ta);
        const NodeRefinement ref = refine_node(unit, cs.source, ct.source, qa, qb);
        const Eigen::Vector2d fa = ref.converged ? ref.a : qa;
        const Eigen::Vector2d fb = ref.converged ? ref.b : qb;

        NodePoint node;
        node.first = to_point(fa);
        node.second = to_point(fb);
        node.first_branch = cs.branch_id;
        node.second_branch = ct.branch_id;
        const CrossSectionPoint img = ref.converged ? image(unit, fa.x(), fa.y())
                                                    : CrossSectionPoint{s.a.x() + u_param * (s.b.x() - s.a.x()),
                                                                        s.a.y() + u_param * (s.b.y() - s.a.y())};
        node.location = {img.rho * L, img.z * L};
        const Eigen::Vector2d va = ref.converged ? image_tangent(unit, cs.source, fa) : Eigen::Vector2d(s.b - s.a);
        const Eigen::Vector2d vb = ref.converged ? image_tangent(unit, ct.source, fb) : Eigen::Vector2d(t.b - t.a);
        const double denom = va.norm() * vb.norm();
        node.crossing_sine = denom > 0.0 ? std::abs(va.x() * vb.y() - va.y() * vb.x()) / denom : 0.0;
        found.push_back(node);
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const NodePoint& x, const NodePoint& y) {
    return std::tie(x.location.z, x.location.rho) < std::tie(y.location.z, y.location.rho);
  });
  for (const NodePoint& n : found) {
    auto& bucket = n.crossing_sine > kTransversalSine ? out.nodes : out.tangencies;
    const bool dup = std::any_of(out.nodes.begin(), out.nodes.end(), [&](const NodePoint& m) {
      return std::hypot(m.location.rho - n.location.rho, m.location.z - n.location.z) < 1e-6 * L;
    }) || std::any_of(out.tangencies.begin(), out.tangencies.end(), [&](const NodePoint& m) {
      return std::hypot(m.location.rho - n.location.rho, m.location.z - n.location.z) < 1e-6 * L;
    });
    if (!dup) bucket.push_back(n);
  }
  return out;
}

NodeSearch find_nodes(const ManipulatorModel& model) { return analyze_singularities(model).nodes; }

GenericityResult genericity_check(const ManipulatorModel& model, const std::vector<SingularCurve>& curves) {
  const ManipulatorModel unit = unit_model(model);
  GenericityResult out;
  out.min_gradient = std::numeric_limits<double>::infinity();
  for (const SingularCurve& c : curves) {
    for (const TorusPoint& v : c.vertices) {
      const double g = gradient(unit, CurveSource::Determinant, v.theta2, v.theta3).norm();
      if (g < out.min_gradient) {
        out.min_gradient = g;
        out.witness = v;
      }
    }
  }
  out.generic = out.min_gradient > kGenericGradient;
  return out;
}

GenericityResult genericity_check(const ManipulatorModel& model) {
  return analyze_singularities(model).genericity;
}

SingularAnalysis analyze_singularities(const ManipulatorModel& model, int n) {
  SingularAnalysis a;
  for (int res = n;; res *= 2) {
    try {
      a.curves = trace_singular_curves(model, res);
      a.resolution = res;
      break;
    } catch (const AnalysisError& e) {
      if (e.kind() != ErrorKind::ResolutionTooLow || res * 2 > kMaxResolution) throw;
    }
  }
  for (const SingularCurve& c : a.curves) {
    BoundaryCurve b = map_boundary(model, c);
    if (b.isolated_point) a.isolated_points.push_back(b.points.front());
    a.boundaries.push_back(std::move(b));
  }
  a.aspects = compute_aspects(model, a.resolution);
  a.cusps = find_cusps(model, a.curves);
  a.nodes = find_nodes(model, a.curves);
  a.genericity = genericity_check(model, a.curves);
  return a;
}

}  // namespace cuspidal
