// Acceptance gate. Run as `acceptance <id>` with id in 1..12 or "sweep";
// prints one PASS/FAIL line and exits non-zero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cuspidal/classify.hpp"
#include "cuspidal/errors.hpp"
#include "cuspidal/feasibility.hpp"
#include "cuspidal/ik.hpp"
#include "cuspidal/polynomial.hpp"
#include "cuspidal/singular.hpp"
#include "cuspidal/workspace.hpp"
#include "oracles.hpp"

using namespace cuspidal;

namespace {

// Tolerances and budgets.
constexpr double kIkJointTol = 0.05;
constexpr double kIkBudgetMs = 1.0;
constexpr int kDetSamples = 10000;
constexpr double kDetRelTol = 1e-8;
constexpr double kDetBudgetS = 1.0;
constexpr double kCuspBudgetS = 30.0;
constexpr double kCuspStabilityTol = 1e-6;
constexpr int kRegionSamples = 10000;
constexpr double kRegionPassRate = 0.99;
constexpr double kRegionBandCells = 2.0;
constexpr int kRegionGrid = 1024;
constexpr double kTripleRootTol = 1e-8;
constexpr double kCalibrationTol = 1e-3;
constexpr double kTopologyBudgetS = 600.0;
constexpr int kUniquenessSamples = 1000;
constexpr int kPostureTrials = 100;
constexpr int kShortcutModelsPerCondition = 10;
constexpr int kScalingModels = 20;
constexpr int kSweepModels = 40;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

ManipulatorModel chain(double a2, double a3) {
  DHParams p = illustrative_params();
  p.a2 = a2;
  p.a3 = a3;
  return validate_params(p);
}

const ManipulatorModel& illustrative() {
  static const ManipulatorModel m = validate_params(illustrative_params());
  return m;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Verdict ik_reproduction() {
  const double reference[4][3] = {{-1.8, -2.8, 1.9}, {-0.9, -0.7, 2.5}, {-2.9, -3.0, -0.2}, {0.2, -0.3, -1.9}};
  const WorkspacePoint p{2.5, 0.0, 0.5};
  const auto sols = solve_ik(illustrative(), p);
  constexpr int kRuns = 200;
  const auto t0 = Clock::now();
  for (int k = 0; k < kRuns; ++k) (void)solve_ik(illustrative(), p);
  const double ms = seconds_since(t0) * 1e3 / kRuns;

  double worst = 0.0;
  std::string where;
  for (int i = 0; i < 4; ++i) {
    double best = 1e9;
    for (const auto& s : sols) {
      const double e = std::max({std::abs(angle_difference(s.config.theta1, reference[i][0])),
                                 std::abs(angle_difference(s.config.theta2, reference[i][1])),
                                 std::abs(angle_difference(s.config.theta3, reference[i][2]))});
      best = std::min(best, e);
    }
    if (best > worst) {
      worst = best;
      where = "q" + std::to_string(i + 1);
    }
  }
  const bool pass = sols.size() == 4 && worst <= kIkJointTol && ms < kIkBudgetMs;
  return {pass, "solutions=" + std::to_string(sols.size()) + " worst_joint_error=" + fmt_double(worst) + " at " +
                    where + " (tol " + fmt_double(kIkJointTol) + ") time_ms=" + fmt_double(ms)};
}

Verdict determinant_consistency() {
  const DHParams p = illustrative_params();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<JointConfig> qs(kDetSamples);
  for (auto& q : qs) q = {angle(rng), angle(rng), angle(rng)};
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& q : qs) {
    const double numeric = jacobian(illustrative(), q).determinant();
    const double ref = p.a3 * oracle::factored_det(p, q.theta2, q.theta3);
    worst = std::max(worst, std::abs(numeric - ref) / std::max(std::abs(ref), 1e-6));
  }
  const double s = seconds_since(t0);
  return {worst <= kDetRelTol && s < kDetBudgetS,
          "worst_relative_error=" + fmt_double(worst) + " time_s=" + fmt_double(s)};
}

std::vector<CrossSectionPoint> cusp_locations(const ManipulatorModel& m, int n, double* seconds) {
  const auto t0 = Clock::now();
  const SingularAnalysis a = analyze_singularities(m, n);
  if (seconds) *seconds = seconds_since(t0);
  std::vector<CrossSectionPoint> out;
  for (const auto& c : a.cusps.cusps) out.push_back(c.location);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return std::tie(x.z, x.rho) < std::tie(y.z, y.rho); });
  return out;
}

Verdict cusp_counts() {
  bool pass = true;
  std::string detail;
  for (auto [a3, expected] : {std::pair{1.5, 4}, {0.5, 0}}) {
    const auto m = chain(2.0, a3);
    double s = 0.0;
    const auto coarse = cusp_locations(m, 1024, &s);
    const auto fine = cusp_locations(m, 2048, nullptr);
    double drift = 0.0;
    bool stable = coarse.size() == fine.size();
    for (std::size_t k = 0; stable && k < coarse.size(); ++k)
      drift = std::max({drift, std::abs(coarse[k].rho - fine[k].rho), std::abs(coarse[k].z - fine[k].z)});
    stable = stable && drift <= kCuspStabilityTol;
    const bool ok = static_cast<int>(coarse.size()) == expected && stable && s < kCuspBudgetS;
    pass = pass && ok;
    detail += "a3=" + fmt_double(a3) + ": cusps=" + std::to_string(coarse.size()) + " expected=" +
              std::to_string(expected) + " N2048=" + std::to_string(fine.size()) + " drift=" + fmt_double(drift) +
              " time_s=" + fmt_double(s) + "; ";
  }
  return {pass, detail};
}

Verdict aspect_count() {
  const AspectMap a = compute_aspects(illustrative());
  return {a.count == 2, "aspects=" + std::to_string(a.count)};
}

int crossings(const std::vector<BoundaryCurve>& boundaries, const std::vector<SingularCurve>& curves,
              const CrossSectionPoint& p) {
  int n = 0;
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    const auto& pts = boundaries[b].points;
    if (boundaries[b].isolated_point || pts.size() < 2) continue;
    const std::size_t m = pts.size();
    const std::size_t segments = curves[b].closed ? m : m - 1;
    for (std::size_t k = 0; k < segments; ++k) {
      const auto& u = pts[k];
      const auto& v = pts[(k + 1) % m];
      if ((u.z > p.z) == (v.z > p.z)) continue;
      const double rho = u.rho + (p.z - u.z) / (v.z - u.z) * (v.rho - u.rho);
      if (rho > p.rho) ++n;
    }
  }
  return n;
}

double distance_to_boundary(const std::vector<BoundaryCurve>& boundaries, const CrossSectionPoint& p) {
  double best = 1e300;
  for (const auto& b : boundaries) {
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
      const Eigen::Vector2d a(b.points[k].rho, b.points[k].z), c(b.points[k + 1].rho, b.points[k + 1].z);
      const Eigen::Vector2d x(p.rho, p.z);
      const Eigen::Vector2d d = c - a;
      const double len2 = d.squaredNorm();
      const double t = len2 > 0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
      best = std::min(best, (a + t * d - x).norm());
    }
  }
  return best;
}

Verdict region_counts() {
  const auto& m = illustrative();
  const SingularAnalysis a = analyze_singularities(m);
  double rho_max = 0.0, z_min = 1e300, z_max = -1e300;
  for (const auto& b : a.boundaries)
    for (const auto& q : b.points) {
      rho_max = std::max(rho_max, q.rho);
      z_min = std::min(z_min, q.z);
      z_max = std::max(z_max, q.z);
    }
  const double cell = rho_max / kRegionGrid;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rho(0.0, rho_max), z(z_min, z_max);
  int consistent = 0, near_failures = 0, far_failures = 0, inner = 0, outer = 0;
  for (int k = 0; k < kRegionSamples; ++k) {
    const CrossSectionPoint p{rho(rng), z(rng)};
    const int count = count_ik(m, {p.rho, 0.0, p.z}).total();
    if (count == 4) ++inner;
    if (count == 2) ++outer;
    const bool ok = (count == 0 || count == 2 || count == 4) && (count / 2) % 2 == crossings(a.boundaries, a.curves, p) % 2;
    if (ok) {
      ++consistent;
    } else if (distance_to_boundary(a.boundaries, p) <= kRegionBandCells * cell) {
      ++near_failures;
    } else {
      ++far_failures;
    }
  }
  const double rate = static_cast<double>(consistent) / kRegionSamples;
  return {rate >= kRegionPassRate && far_failures == 0 && inner > 0 && outer > 0,
          "consistent=" + fmt_double(rate) + " failures_near_boundary=" + std::to_string(near_failures) +
              " failures_elsewhere=" + std::to_string(far_failures) + " samples_4iks=" + std::to_string(inner) +
              " samples_2iks=" + std::to_string(outer)};
}

Verdict triple_root_certificate() {
  const auto& m = illustrative();
  const auto cusps = find_cusps(m).cusps;
  double worst = 0.0;
  bool counts_ok = !cusps.empty();
  for (const auto& c : cusps) {
    const auto coeffs = quartic_coefficients(m, IKQuery::from_point({c.location.rho, 0.0, c.location.z}));
    const double t = std::tan(c.source.theta3 / 2);
    const double norm = poly_norm(coeffs);
    for (int order = 0; order < 3; ++order) worst = std::max(worst, std::abs(poly_eval(coeffs, t, order)) / norm);
    const IKCount count = count_ik(m, {c.location.rho, 0.0, c.location.z});
    counts_ok = counts_ok && count.distinct == 2 && count.multiplicities == std::vector<int>{3, 1};
  }
  return {worst < kTripleRootTol && counts_ok,
          "cusps=" + std::to_string(cusps.size()) + " worst_relative_residual=" + fmt_double(worst) +
              " ik_counts_triple_plus_single=" + (counts_ok ? "yes" : "no")};
}

Verdict closed_form_calibration() {
  const double a1 = 1.0, d2 = 1.0;
  ScanOptions opts;
  std::vector<ScanLine> lines;
  for (double a2 : {0.5, 2.0, 3.0}) lines.push_back({a2, bifurcation_oracle(a1, d2, a2, 0.05, 4.0, opts)});
  const C1Calibration cal = calibrate_c1(a1, d2, lines, kCalibrationTol);

  bool surfaces_ok = true;
  std::string detail;
  for (const ScanLine& line : lines) {
    const SurfaceValues s = surface_values(a1, line.a2, d2);
    std::vector<double> predicted{s.C2};
    if (s.C1) predicted.push_back(*s.C1);
    if (s.C3) predicted.push_back(*s.C3);
    if (s.C4) predicted.push_back(*s.C4);
    detail += "a2=" + fmt_double(line.a2) + " boundaries=[";
    for (const auto& b : line.boundaries) {
      double best = 1e300;
      for (double v : predicted) best = std::min(best, std::abs(v - b.a3));
      surfaces_ok = surfaces_ok && best <= kCalibrationTol;
      detail += fmt_double(b.a3) + "(" + std::to_string(b.cusps_below) + "->" + std::to_string(b.cusps_above) + ") ";
    }
    for (std::optional<double> v : {std::optional<double>(s.C2), s.C3}) {
      if (!v || *v > 4.0) continue;
      double best = 1e300;
      for (const auto& b : line.boundaries) best = std::min(best, std::abs(*v - b.a3));
      surfaces_ok = surfaces_ok && best <= kCalibrationTol;
    }
    detail += "] ";
  }
  double c1_ref = std::nan("");
  if (cal.matching.size() == 1) {
    try {
      c1_ref = c1_value(1.0, 2.0, 1.0, cal.matching.front());
    } catch (const AnalysisError&) {
    }
  }
  const bool c1_in_range = c1_ref > 0.5 && c1_ref < 1.5;
  detail += "matching_variants=" + std::to_string(cal.matching.size());
  for (C1Variant v : cal.matching) detail += " " + std::string(to_string(v));
  detail += " C1(1,2,1)=" + fmt_double(c1_ref) + " required_in=(0.5,1.5)";
  return {cal.matching.size() == 1 && surfaces_ok && c1_in_range, detail};
}

Verdict topology_table() {
  struct Cell {
    int wt;
    double a2, a3;
    int cusps, nodes;
  };
  const Cell cells[] = {{1, 2.0, 0.1, 0, 0},  {2, 2.0, 0.5, 4, 2},  {3, 2.0, 1.5, 4, 0},
                        {4, 2.0, 2.05, 4, 2}, {5, 2.0, 2.15, 2, 1}, {6, 2.0, 2.5, 2, 3},
                        {7, 2.0, 3.5, 4, 4},  {8, 0.5, 1.3, 0, 0},  {9, 0.5, 2.0, 0, 2}};
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const Cell& c : cells) {
    const auto m = chain(c.a2, c.a3);
    const SingularAnalysis a = analyze_singularities(m);
    const int cusps = static_cast<int>(a.cusps.cusps.size());
    const int nodes = static_cast<int>(a.nodes.nodes.size());
    const bool has_void = raster_has_void(WorkspaceRaster(m));
    int wt = 0;
    try {
      wt = topology_from_counts(cusps, nodes, has_void);
    } catch (const AnalysisError&) {
    }
    const bool ok = cusps == c.cusps && nodes == c.nodes && wt == c.wt;
    pass = pass && ok;
    detail += "WT" + std::to_string(c.wt) + "(" + fmt_double(c.a2) + "," + fmt_double(c.a3) + ")=(" +
              std::to_string(cusps) + "," + std::to_string(nodes) + (has_void ? ",void" : "") + ")" +
              (ok ? "" : "!") + " ";
  }
  const double s = seconds_since(t0);
  detail += "time_s=" + fmt_double(s);
  return {pass && s < kTopologyBudgetS, detail};
}

Verdict feasibility_structure() {
  const auto& m = illustrative();
  const FeasibilityAnalysis f = analyze_feasibility(m);
  bool three_each = f.reduced.aspects.count == 2;
  std::string per;
  for (int k = 0; k < f.reduced.aspects.count; ++k) {
    const auto n = f.reduced.of_aspect(k).size();
    three_each = three_each && n == 3;
    per += std::to_string(n) + " ";
  }
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  int violations = 0, checked = 0;
  while (checked < kUniquenessSamples) {
    const double t2 = angle(rng), t3 = angle(rng);
    if (std::abs(det_jacobian(m, t2, t3)) < 1e-2) continue;
    const auto sols = solve_ik(m, forward(m, {0.0, t2, t3}));
    for (const auto& d : f.domains) {
      int inside = 0;
      for (const auto& s : sols)
        if (d.contains(f.reduced, m, {s.config.theta2, s.config.theta3}, static_cast<int>(sols.size()))) ++inside;
      if (inside > 1) ++violations;
    }
    ++checked;
  }
  const bool pass = three_each && f.domains.size() == 4 && f.regions.size() == 4 && violations == 0;
  return {pass, "reduced_per_aspect=" + per + "domains=" + std::to_string(f.domains.size()) +
                    " regions=" + std::to_string(f.regions.size()) + " uniqueness_violations=" +
                    std::to_string(violations) + "/" + std::to_string(checked)};
}

Verdict posture_change() {
  const auto& m = illustrative();
  const WorkspacePoint target{2.5, 0.0, 0.5};
  // Solutions are ordered by theta3: reference q4, q3, q1, q2.
  constexpr int kQ2 = 3, kQ3 = 1, kQ4 = 0;
  std::string detail;
  bool pass = true;
  try {
    const PostureChange c = plan_posture_change(m, target, kQ2, kQ3);
    const bool ok = c.min_det > 0 && !c.enclosed_cusps.empty();
    pass = pass && ok;
    detail += "q2->q3 min_det=" + fmt_double(c.min_det) + " enclosed=" + std::to_string(c.enclosed_cusps.size()) + "; ";
  } catch (const AnalysisError& e) {
    pass = false;
    detail += std::string("q2->q3 error ") + std::string(to_string(e.kind())) + "; ";
  }
  try {
    plan_posture_change(m, target, kQ2, kQ4);
    pass = false;
    detail += "q2->q4 accepted; ";
  } catch (const AnalysisError& e) {
    pass = pass && e.kind() == ErrorKind::DifferentAspects;
    detail += std::string("q2->q4 ") + std::string(to_string(e.kind())) + "; ";
  }

  const SingularAnalysis a = analyze_singularities(m);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  int trials = 0, successes = 0, singular = 0, counterexamples = 0;
  while (trials < kPostureTrials) {
    const WorkspacePoint p = forward(m, {0.0, angle(rng), angle(rng)});
    const auto sols = solve_ik(m, p);
    if (sols.size() < 2) continue;
    for (std::size_t i = 0; i < sols.size() && trials < kPostureTrials; ++i) {
      for (std::size_t j = i + 1; j < sols.size() && trials < kPostureTrials; ++j) {
        const int ai = a.aspects.aspect_of(m, sols[i].config.theta2, sols[i].config.theta3);
        const int aj = a.aspects.aspect_of(m, sols[j].config.theta2, sols[j].config.theta3);
        if (ai < 0 || ai != aj) continue;
        ++trials;
        try {
          const PostureChange c = plan_posture_change(m, p, static_cast<int>(i), static_cast<int>(j), a.aspects,
                                                      a.cusps.cusps);
          ++successes;
          if (c.enclosed_cusps.empty()) ++counterexamples;
        } catch (const AnalysisError& e) {
          if (e.kind() == ErrorKind::SingularPath) ++singular;
        }
      }
    }
  }
  pass = pass && counterexamples == 0 && successes > 0;
  detail += "random_same_aspect_pairs=" + std::to_string(trials) + " nonsingular=" + std::to_string(successes) +
            " singular=" + std::to_string(singular) + " without_enclosed_cusp=" + std::to_string(counterexamples);
  return {pass, detail};
}

DHParams condition_model(int condition, std::mt19937& rng) {
  std::uniform_real_distribution<double> len(0.2, 3.0), ang(-3.0, 3.0), sign(-1.0, 1.0);
  DHParams p{len(rng), len(rng), len(rng), len(rng), len(rng), ang(rng), ang(rng)};
  const double quarter = sign(rng) < 0 ? -oracle::kHalfPi : oracle::kHalfPi;
  switch (condition) {
    case 1: p.alpha1 = sign(rng) < 0 ? 0.0 : std::numbers::pi; break;
    case 2: p.alpha2 = sign(rng) < 0 ? 0.0 : std::numbers::pi; break;
    case 3: p.a1 = 0.0; break;
    case 4: p.a2 = 0.0; break;
    case 5:
      p.alpha1 = quarter;
      p.d2 = 0.0;
      p.d3 = 0.0;
      break;
    case 6:
      p.alpha1 = quarter;
      p.alpha2 = sign(rng) < 0 ? -oracle::kHalfPi : oracle::kHalfPi;
      p.d2 = 0.0;
      break;
  }
  return p;
}

Verdict geometric_shortcuts() {
  std::mt19937 rng(21);
  int total = 0, zero = 0;
  std::string detail;
  for (int condition = 1; condition <= 6; ++condition) {
    int with_cusps = 0;
    for (int k = 0; k < kShortcutModelsPerCondition; ++k) {
      const auto m = validate_params(condition_model(condition, rng));
      const auto cusps = analyze_singularities(m).cusps.cusps.size();
      ++total;
      if (cusps == 0) {
        ++zero;
      } else {
        ++with_cusps;
      }
      if (!m.conditions().contains(condition)) ++with_cusps;
    }
    detail += "condition" + std::to_string(condition) + "_nonzero=" + std::to_string(with_cusps) + " ";
  }
  return {zero == total, detail + "models=" + std::to_string(total)};
}

Verdict scaling_invariance() {
  std::mt19937 rng(31);
  int mismatches = 0;
  std::string first;
  for (int k = 0; k < kScalingModels; ++k) {
    const auto m = validate_params(oracle::random_orthogonal(rng, k % 2 == 0));
    const ClassificationReport base = classify(m);
    for (double lambda : {0.1, 10.0}) {
      if (!(classify(scaled(m, lambda)) == base)) {
        ++mismatches;
        if (first.empty()) first = " first_mismatch_model=" + std::to_string(k) + " lambda=" + fmt_double(lambda);
      }
    }
  }
  return {mismatches == 0, "models=" + std::to_string(kScalingModels) + " mismatches=" + std::to_string(mismatches) + first};
}

Verdict even_cusp_sweep() {
  std::mt19937 rng(41);
  std::map<int, int> histogram;
  bool pass = true;
  for (int k = 0; k < kSweepModels; ++k) {
    const auto m = validate_params(oracle::random_orthogonal(rng, false));
    const int cusps = static_cast<int>(analyze_singularities(m).cusps.cusps.size());
    ++histogram[cusps];
    pass = pass && cusps % 2 == 0 && cusps <= 8;
  }
  std::string detail = "cusp_histogram=";
  for (auto [c, n] : histogram) detail += std::to_string(c) + ":" + std::to_string(n) + " ";
  detail += std::string("more_than_four_found=") + (histogram.rbegin()->first > 4 ? "yes" : "no");
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1", {"ik reproduction", ik_reproduction}},
      {"2", {"determinant consistency", determinant_consistency}},
      {"3", {"cusp counts", cusp_counts}},
      {"4", {"aspect count", aspect_count}},
      {"5", {"region ik counts", region_counts}},
      {"6", {"triple-root certificate", triple_root_certificate}},
      {"7", {"closed-form calibration", closed_form_calibration}},
      {"8", {"topology table", topology_table}},
      {"9", {"feasibility structure", feasibility_structure}},
      {"10", {"posture change", posture_change}},
      {"11", {"geometric shortcuts", geometric_shortcuts}},
      {"12", {"scaling invariance", scaling_invariance}},
      {"sweep", {"even cusp counts with d3 != 0", even_cusp_sweep}},
  };
  std::vector<std::string> ids;
  if (argc > 1) {
    ids.assign(argv + 1, argv + argc);
  } else {
    for (const auto& [id, _] : criteria) ids.push_back(id);
  }
  bool all = true;
  for (const auto& id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const AnalysisError& e) {
      v = {false, std::string("error ") + std::string(to_string(e.kind())) + ": " + e.what()};
    }
    std::printf("%s criterion %s (%s): %s\n", v.pass ? "PASS" : "FAIL", id.c_str(), it->second.first.c_str(),
                v.detail.c_str());
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
