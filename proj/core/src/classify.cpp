#include "cuspidal/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "cuspidal/errors.hpp"
#include "cuspidal/workspace.hpp"

namespace cuspidal {

namespace {

constexpr int kMaxResolution = 8192;
constexpr int kVoidRaster = 512;

std::vector<SingularCurve> trace_with_refinement(const ManipulatorModel& model, int n) {
  for (int res = n;; res *= 2) {
    try {
      return trace_singular_curves(model, res);
    } catch (const AnalysisError& e) {
      if (e.kind() != ErrorKind::ResolutionTooLow || res * 2 > kMaxResolution) throw;
    }
  }
}

ManipulatorModel scan_model(double a1, double d2, double a2, double a3) {
  return validate_params({a1, a2, a3, d2, 0.0, -std::numbers::pi / 2, std::numbers::pi / 2});
}

bool closed_form_applicable(const ManipulatorModel& m) {
  const DHParams& p = m.params();
  return m.closed_form_determinant() && !m.length_is_zero(p.a1) && !m.length_is_zero(p.a2) &&
         !m.length_is_zero(p.a3) && !m.length_is_zero(p.d2);
}

void require_classifiable(const ManipulatorModel& m) {
  if (!closed_form_applicable(m)) {
    throw AnalysisError(ErrorKind::NotClassifiable,
                        "domain and topology need an orthogonal chain with d3 = 0 and nonzero a1, a2, a3, d2");
  }
}

SurfaceValues model_surfaces(const ManipulatorModel& m) {
  const DHParams& p = m.params();
  return surface_values(std::abs(p.a1), std::abs(p.a2), std::abs(p.d2));
}

int cusps_of_domain(int domain) {
  switch (domain) {
    case 2:
    case 4:
      return 4;
    case 3:
      return 2;
    default:
      return 0;
  }
}

int numeric_domain(const ManipulatorModel& m, int cusps, const std::optional<bool>& void_flag) {
  const SurfaceValues s = model_surfaces(m);
  const double a3 = std::abs(m.params().a3);
  switch (cusps) {
    case 0:
      return void_flag.value_or(has_void(m)) ? 1 : 5;
    case 2:
      return 3;
    case 4:
      return a3 < s.C2 ? 2 : 4;
    default:
      throw AnalysisError(ErrorKind::NotClassifiable, fmt::format("{} cusps fit no domain", cusps));
  }
}

void append(std::optional<std::string>& note, const std::string& text) {
  note = note ? *note + "; " + text : text;
}

}  // namespace

std::string_view to_string(C1Variant variant) {
  switch (variant) {
    case C1Variant::HalfOuter:
      return "half_outer";
    case C1Variant::HalfFirst:
      return "half_first";
    case C1Variant::HalfOuterSquared:
      return "half_outer_squared";
    case C1Variant::HalfFirstSquared:
      return "half_first_squared";
  }
  return "unknown";
}

std::string_view to_string(ClassifyMethod method) {
  switch (method) {
    case ClassifyMethod::ClosedForm:
      return "closed_form";
    case ClassifyMethod::Numeric:
      return "numeric";
    case ClassifyMethod::Both:
      return "both";
  }
  return "unknown";
}

double c1_value(double a1, double a2, double d2, C1Variant variant) {
  const double A = std::hypot(a2 + a1, d2);
  const double B = std::hypot(a2 - a1, d2);
  const double S = a2 * a2 + d2 * d2;
  const double D = a2 * a2 - d2 * d2;
  const double AB = A * B;
  if (!(AB > 0.0)) throw AnalysisError(ErrorKind::Undefined, "C1 is undefined when B = 0");
  double radicand = 0.0;
  switch (variant) {
    case C1Variant::HalfOuter:
      radicand = 0.5 * (S - (S * S - a1 * a1 * D) / AB);
      break;
    case C1Variant::HalfFirst:
      radicand = 0.5 * S - (S * S - a1 * a1 * D) / AB;
      break;
    case C1Variant::HalfOuterSquared:
      radicand = 0.5 * (S - (S * S - D * D) / AB);
      break;
    case C1Variant::HalfFirstSquared:
      radicand = 0.5 * S - (S * S - D * D) / AB;
      break;
  }
  if (radicand < 0.0) {
    throw AnalysisError(ErrorKind::Undefined, fmt::format("C1 radicand is negative ({:.6g})", radicand));
  }
  return std::sqrt(radicand);
}

double SurfaceValues::c1() const {
  if (!C1) throw AnalysisError(ErrorKind::Undefined, "C1 radicand is negative");
  return *C1;
}

double SurfaceValues::c3() const {
  if (!C3) throw AnalysisError(ErrorKind::Undefined, "C3 needs a2 > a1");
  return *C3;
}

double SurfaceValues::c4() const {
  if (!C4) throw AnalysisError(ErrorKind::Undefined, "C4 needs a2 < a1");
  return *C4;
}

SurfaceValues surface_values(double a1, double a2, double d2, C1Variant variant) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(d2) || !(a1 > 0.0) || !(a2 > 0.0)) {
    throw AnalysisError(ErrorKind::InvalidParams, "surface values need finite a1 > 0, a2 > 0 and d2");
  }
  SurfaceValues s;
  s.A = std::hypot(a2 + a1, d2);
  s.B = std::hypot(a2 - a1, d2);
  try {
    s.C1 = c1_value(a1, a2, d2, variant);
  } catch (const AnalysisError&) {
    s.C1.reset();
  }
  s.C2 = a2 / (a1 + a2) * s.A;
  if (a2 > a1) s.C3 = a2 / (a2 - a1) * s.B;
  if (a2 < a1) s.C4 = a2 / (a1 - a2) * s.B;
  s.E1 = 0.5 * (s.A - s.B);
  s.E2 = a2;
  s.E3 = 0.5 * (s.A + s.B);
  return s;
}

int scan_line_cusps(double a1, double d2, double a2, double a3, int resolution) {
  const ManipulatorModel m = scan_model(a1, d2, a2, a3);
  return static_cast<int>(find_cusps(m, trace_with_refinement(m, resolution)).cusps.size());
}

std::vector<Bifurcation> bifurcation_oracle(double a1, double d2, double a2, double a3_lo, double a3_hi,
                                            const ScanOptions& options) {
  if (!(a3_lo > 0.0) || !(a3_hi > a3_lo) || !(options.step > 0.0) || !(options.tolerance > 0.0)) {
    throw AnalysisError(ErrorKind::InvalidParams, "scan needs 0 < a3_lo < a3_hi and positive step");
  }
  const int steps = std::max(1, static_cast<int>(std::ceil((a3_hi - a3_lo) / options.step)));
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) grid[static_cast<std::size_t>(k)] = std::min(a3_hi, a3_lo + k * options.step);
  std::vector<int> counts(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) counts[k] = scan_line_cusps(a1, d2, a2, grid[k], options.resolution);

  std::vector<Bifurcation> out;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (counts[k] == counts[k + 1]) continue;
    double lo = grid[k], hi = grid[k + 1];
    int below = counts[k], above = counts[k + 1];
    while (hi - lo >= options.tolerance) {
      const double mid = 0.5 * (lo + hi);
      const int c = scan_line_cusps(a1, d2, a2, mid, options.resolution);
      if (c == below) {
        lo = mid;
      } else {
        hi = mid;
        above = c;
      }
    }
    out.push_back({0.5 * (lo + hi), below, above});
  }
  return out;
}

C1Calibration calibrate_c1(double a1, double d2, const std::vector<ScanLine>& lines, double tolerance) {
  C1Calibration cal;
  for (C1Variant v : kAllC1Variants) {
    double worst = 0.0;
    for (const ScanLine& line : lines) {
      if (line.boundaries.empty()) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      try {
        worst = std::max(worst, std::abs(c1_value(a1, line.a2, d2, v) - line.boundaries.front().a3));
      } catch (const AnalysisError&) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
    }
    cal.worst_error.push_back(worst);
    if (worst <= tolerance) cal.matching.push_back(v);
  }
  return cal;
}

int closed_form_domain(const ManipulatorModel& model) {
  require_classifiable(model);
  const DHParams& p = model.params();
  const double a1 = std::abs(p.a1), a2 = std::abs(p.a2), a3 = std::abs(p.a3);
  const SurfaceValues s = model_surfaces(model);
  if (a3 < s.C1.value_or(0.0)) return 1;
  if (a3 < s.C2) return 2;
  if (a2 > a1) return a3 < s.c3() ? 3 : 4;
  if (a2 < a1) return a3 < s.c4() ? 3 : 5;
  return 3;
}

int classify_domain(const ManipulatorModel& model) {
  require_classifiable(model);
  const int cusps = static_cast<int>(find_cusps(model, trace_with_refinement(model, kDefaultResolution)).cusps.size());
  return numeric_domain(model, cusps, std::nullopt);
}

int topology_from_counts(int cusps, int nodes, bool has_void) {
  if (cusps == 0 && nodes == 0) return has_void ? 1 : 8;
  if (cusps == 4 && nodes == 2) return has_void ? 2 : 4;
  if (cusps == 4 && nodes == 0) return 3;
  if (cusps == 2 && nodes == 1) return 5;
  if (cusps == 2 && nodes == 3) return 6;
  if (cusps == 4 && nodes == 4) return 7;
  if (cusps == 0 && nodes == 2) return 9;
  throw AnalysisError(ErrorKind::UnknownTopology,
                      fmt::format("no topology with {} cusps, {} nodes, void={}", cusps, nodes, has_void));
}

int classify_topology(const ManipulatorModel& model) {
  require_classifiable(model);
  const std::vector<SingularCurve> curves = trace_with_refinement(model, kDefaultResolution);
  const int cusps = static_cast<int>(find_cusps(model, curves).cusps.size());
  const int nodes = static_cast<int>(find_nodes(model, curves).nodes.size());
  const bool needs_void = nodes == 0 ? cusps == 0 : (cusps == 4 && nodes == 2);
  return topology_from_counts(cusps, nodes, needs_void && has_void(model));
}

namespace {

bool closed_form_cuspidal(const ManipulatorModel& model) {
  const DHParams& p = model.params();
  const double a1 = std::abs(p.a1), a2 = std::abs(p.a2), a3 = std::abs(p.a3);
  const SurfaceValues s = model_surfaces(model);
  if (a3 < s.C1.value_or(0.0)) return false;
  return !(a2 < a1 && a3 > s.c4());
}

}  // namespace

CuspidalityVerdict is_cuspidal(const ManipulatorModel& model) {
  CuspidalityVerdict v;
  if (!model.conditions().empty()) {
    v.condition = model.conditions().ids().front();
    v.cuspidal = false;
    return v;
  }
  if (closed_form_applicable(model)) v.closed_form = closed_form_cuspidal(model);
  const int cusps = static_cast<int>(find_cusps(model, trace_with_refinement(model, kDefaultResolution)).cusps.size());
  v.numeric_cusps = cusps;
  v.cuspidal = cusps > 0;
  if (v.closed_form && *v.closed_form != v.cuspidal) {
    v.discrepancy = fmt::format("closed form says {}, numeric count is {}",
                                *v.closed_form ? "cuspidal" : "noncuspidal", cusps);
  }
  return v;
}

bool has_four_iks(const ManipulatorModel& model) {
  if (closed_form_applicable(model)) {
    return std::abs(model.params().a3) >= model_surfaces(model).C1.value_or(0.0);
  }
  return WorkspaceRaster(model, kVoidRaster).max_count() >= 4;
}

bool has_void(const ManipulatorModel& model) { return raster_has_void(WorkspaceRaster(model, kVoidRaster)); }

bool is_quadratic(const ManipulatorModel& model) { return !model.conditions().empty(); }

ClassificationReport classify(const ManipulatorModel& model, ClassifyMethod method, int resolution) {
  ClassificationReport r;
  r.method = method;
  r.c1_variant = std::string(to_string(kCalibratedC1));
  r.conditions = model.conditions().ids();
  r.quadratic = is_quadratic(model);
  const bool closed = closed_form_applicable(model);

  if (r.quadratic && method != ClassifyMethod::Numeric) {
    r.cuspidal = false;
    return r;
  }

  std::optional<int> closed_domain;
  std::optional<bool> closed_four;
  if (method != ClassifyMethod::Numeric) {
    if (!closed) {
      if (method == ClassifyMethod::ClosedForm) {
        throw AnalysisError(ErrorKind::NotClassifiable,
                            "closed forms need an orthogonal chain with d3 = 0 and nonzero a1, a2, a3, d2");
      }
    } else {
      closed_domain = closed_form_domain(model);
      closed_four = has_four_iks(model);
    }
  }

  if (method == ClassifyMethod::ClosedForm) {
    r.domain = closed_domain;
    r.cusp_count = cusps_of_domain(*closed_domain);
    r.cuspidal = *r.cusp_count > 0;
    r.four_iks = closed_four;
    return r;
  }

  const std::vector<SingularCurve> curves = trace_with_refinement(model, resolution);
  const int cusps = static_cast<int>(find_cusps(model, curves).cusps.size());
  const int nodes = static_cast<int>(find_nodes(model, curves).nodes.size());
  r.cusp_count = cusps;
  r.node_count = nodes;
  r.cuspidal = cusps > 0;
  r.generic = genericity_check(model, curves).generic;

  const WorkspaceRaster raster(model, kVoidRaster);
  r.has_void = raster_has_void(raster);
  const bool raster_four = raster.max_count() >= 4;
  r.four_iks = closed_four.value_or(raster_four);
  if (closed_four && raster_four && !*closed_four) {
    append(r.discrepancy, "four solutions sampled below C1");
  }

  if (r.quadratic && cusps > 0) {
    append(r.discrepancy, fmt::format("geometric condition holds but {} cusps were found", cusps));
  }

  if (closed) {
    try {
      r.domain = numeric_domain(model, cusps, r.has_void);
    } catch (const AnalysisError& e) {
      append(r.discrepancy, e.what());
    }
    try {
      r.topology = topology_from_counts(cusps, nodes, *r.has_void);
    } catch (const AnalysisError& e) {
      append(r.discrepancy, e.what());
    }
    if (closed_domain && r.domain && *closed_domain != *r.domain) {
      append(r.discrepancy, fmt::format("closed-form domain {} differs from numeric domain {}", *closed_domain,
                                        *r.domain));
    }
  }
  return r;
}

}  // namespace cuspidal
