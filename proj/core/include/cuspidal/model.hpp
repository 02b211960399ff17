#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

namespace cuspidal {

/// Denavit-Hartenberg parameters of a 3R positioning chain. d1 and the
/// joint offsets are fixed at zero; angles are in radians.
struct DHParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  friend bool operator==(const DHParams&, const DHParams&) = default;
};

/// The orthogonal chain a1=1, a2=2, a3=1.5, d2=1, d3=0, alpha1=-pi/2,
/// alpha2=pi/2 used throughout the tests and documentation.
DHParams illustrative_params();

/// Set of satisfied noncuspidal geometric conditions, ids 1..6:
///   1 sin(alpha1)=0   2 sin(alpha2)=0   3 a1=0   4 a2=0
///   5 cos(alpha1)=0, d2=0, d3=0   6 cos(alpha1)=cos(alpha2)=0, d2=0
class ConditionSet {
 public:
  ConditionSet() = default;

  void insert(int id);
  bool contains(int id) const;
  bool empty() const { return mask_ == 0; }
  int size() const;
  std::vector<int> ids() const;

  friend bool operator==(const ConditionSet&, const ConditionSet&) = default;

 private:
  std::uint8_t mask_ = 0;
};

/// Validated manipulator description with derived flags. Immutable.
class ManipulatorModel {
 public:
  const DHParams& params() const { return params_; }
  bool orthogonal() const { return orthogonal_; }
  const ConditionSet& conditions() const { return conditions_; }
  /// Factor applied by normalize(); 1 for models that were never normalized.
  double unit_scale() const { return unit_scale_; }
  /// a1 + a2 + a3 + |d2| + |d3|, the characteristic length of the chain.
  double length_scale() const { return length_scale_; }

  // Trigonometry of the twist angles; exact 0/±1 for orthogonal models.
  double cos_alpha1() const { return ca1_; }
  double sin_alpha1() const { return sa1_; }
  double cos_alpha2() const { return ca2_; }
  double sin_alpha2() const { return sa2_; }

  /// Orthogonal with d3 = 0: the determinant factors in closed form.
  bool closed_form_determinant() const;
  /// True when |value| is below the zero tolerance for lengths.
  bool length_is_zero(double value) const;

 private:
  friend ManipulatorModel validate_params(const DHParams& raw);
  friend ManipulatorModel normalize(const ManipulatorModel& model);

  ManipulatorModel() = default;

  DHParams params_;
  bool orthogonal_ = false;
  ConditionSet conditions_;
  double unit_scale_ = 1.0;
  double length_scale_ = 1.0;
  double ca1_ = 1.0, sa1_ = 0.0, ca2_ = 1.0, sa2_ = 0.0;
};

struct JointConfig {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  /// Returns the configuration with every angle wrapped to [-pi, pi).
  JointConfig normalized() const;
};

inline constexpr double kAngleTolerance = 1e-9;
inline constexpr double kLengthTolerance = 1e-9;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle);
/// Smallest signed difference b - a on the circle, in [-pi, pi).
double angle_difference(double a, double b);

/// Checks finiteness and non-degeneracy and derives the model flags.
/// Throws AnalysisError(InvalidParams).
ManipulatorModel validate_params(const DHParams& raw);

ConditionSet geometric_class(const DHParams& params);

/// Similarity-scales the chain so that a1 = 1; unit_scale records the
/// original a1. Throws AnalysisError(NotScalable) when a1 = 0.
ManipulatorModel normalize(const ManipulatorModel& model);

/// Uniformly scales every length by factor (> 0).
ManipulatorModel scaled(const ManipulatorModel& model, double factor);

/// Same chain with a3 replaced; convenient for parameter scans.
ManipulatorModel with_a3(const ManipulatorModel& model, double a3);

}  // namespace cuspidal
