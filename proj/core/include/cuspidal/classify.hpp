#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuspidal/model.hpp"
#include "cuspidal/singular.hpp"

namespace cuspidal {

/// Candidate closed forms for the surface bounding the noncuspidal domain
/// with a void. S = a2^2 + d2^2, D = a2^2 - d2^2, A and B as in
/// SurfaceValues:
///   HalfOuter          sqrt(1/2 (S - (S^2 - a1^2 D) / (A B)))
///   HalfFirst          sqrt(1/2 S - (S^2 - a1^2 D) / (A B))
///   HalfOuterSquared   sqrt(1/2 (S - (S^2 - D^2) / (A B)))
///   HalfFirstSquared   sqrt(1/2 S - (S^2 - D^2) / (A B))
enum class C1Variant { HalfOuter, HalfFirst, HalfOuterSquared, HalfFirstSquared };

inline constexpr C1Variant kAllC1Variants[] = {C1Variant::HalfOuter, C1Variant::HalfFirst,
                                               C1Variant::HalfOuterSquared, C1Variant::HalfFirstSquared};

/// Variant selected by calibrate_c1 against the numeric bifurcation oracle.
inline constexpr C1Variant kCalibratedC1 = C1Variant::HalfOuter;

std::string_view to_string(C1Variant variant);

/// Critical values of a3 at fixed (a1, a2, d2) for orthogonal chains with
/// d3 = 0. Cusp counts change across C1..C4, node counts across E1..E3.
struct SurfaceValues {
  double A = 0.0;  // sqrt((a2 + a1)^2 + d2^2)
  double B = 0.0;  // sqrt((a2 - a1)^2 + d2^2)
  /// Empty when the radicand is negative.
  std::optional<double> C1;
  double C2 = 0.0;
  std::optional<double> C3;  // a2 > a1
  std::optional<double> C4;  // a2 < a1
  double E1 = 0.0, E2 = 0.0, E3 = 0.0;

  /// Throw AnalysisError(Undefined) when the value does not exist.
  double c1() const;
  double c3() const;
  double c4() const;
};

/// Throws AnalysisError(InvalidParams) unless a1 > 0, a2 > 0 and all inputs
/// are finite.
SurfaceValues surface_values(double a1, double a2, double d2, C1Variant variant = kCalibratedC1);

/// C1 alone; throws AnalysisError(Undefined) for a negative radicand.
double c1_value(double a1, double a2, double d2, C1Variant variant);

/// One change of the numeric cusp count along a scan line.
struct Bifurcation {
  double a3 = 0.0;
  int cusps_below = 0;
  int cusps_above = 0;
};

struct ScanOptions {
  double step = 0.05;
  double tolerance = 1e-4;
  int resolution = kDefaultResolution;
};

/// Cusp-count changes of the chain (a1, a2, a3, d2, d3 = 0, -pi/2, pi/2) for
/// a3 in [a3_lo, a3_hi], each localized by bisection to options.tolerance.
std::vector<Bifurcation> bifurcation_oracle(double a1, double d2, double a2, double a3_lo, double a3_hi,
                                            const ScanOptions& options = {});

/// Numeric cusp count of the scan-line chain.
int scan_line_cusps(double a1, double d2, double a2, double a3, int resolution = kDefaultResolution);

struct ScanLine {
  double a2 = 0.0;
  std::vector<Bifurcation> boundaries;
};

struct C1Calibration {
  /// Variants whose C1 matches the first boundary of every line.
  std::vector<C1Variant> matching;
  /// Worst |C1 - boundary| per variant, in kAllC1Variants order (infinite
  /// when undefined on some line).
  std::vector<double> worst_error;
};

/// Compares every C1 variant against the first (noncuspidal to cuspidal)
/// boundary of each line with a1 and d2 given.
C1Calibration calibrate_c1(double a1, double d2, const std::vector<ScanLine>& lines, double tolerance = 1e-3);

enum class ClassifyMethod { ClosedForm, Numeric, Both };

std::string_view to_string(ClassifyMethod method);

struct ClassificationReport {
  std::optional<int> cusp_count;
  std::optional<int> node_count;
  std::optional<int> domain;
  std::optional<int> topology;
  bool cuspidal = false;
  std::optional<bool> four_iks;
  std::optional<bool> has_void;
  std::optional<bool> generic;
  bool quadratic = false;
  std::vector<int> conditions;
  ClassifyMethod method = ClassifyMethod::Both;
  std::string c1_variant;
  std::optional<std::string> discrepancy;

  friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

/// Domain id 1..5 from cusp count, void flag and the C-surfaces. Throws
/// AnalysisError(NotClassifiable) unless the chain is orthogonal with d3 = 0
/// and nonzero a1, a2, a3, d2.
int classify_domain(const ManipulatorModel& model);
/// Closed-form domain from the position of a3 relative to C1..C4.
int closed_form_domain(const ManipulatorModel& model);

/// Topology id 1..9 from (cusps, nodes, void). Throws
/// AnalysisError(UnknownTopology) for any other triple.
int topology_from_counts(int cusps, int nodes, bool has_void);
int classify_topology(const ManipulatorModel& model);

struct CuspidalityVerdict {
  bool cuspidal = false;
  /// Geometric condition that settled the verdict without tracing.
  std::optional<int> condition;
  std::optional<bool> closed_form;
  std::optional<int> numeric_cusps;
  std::optional<std::string> discrepancy;
};

CuspidalityVerdict is_cuspidal(const ManipulatorModel& model);

/// a3 >= C1 for orthogonal chains with d3 = 0; otherwise any raster cell with
/// four solutions.
bool has_four_iks(const ManipulatorModel& model);
bool has_void(const ManipulatorModel& model);
bool is_quadratic(const ManipulatorModel& model);

ClassificationReport classify(const ManipulatorModel& model, ClassifyMethod method = ClassifyMethod::Both,
                              int resolution = kDefaultResolution);

}  // namespace cuspidal
