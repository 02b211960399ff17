#pragma once

#include <array>
#include <vector>

#include "cuspidal/kinematics.hpp"
#include "cuspidal/model.hpp"

namespace cuspidal {

/// Rotation-invariant description of a target: R = x^2 + y^2, Z = z^2.
struct IKQuery {
  double R = 0.0;
  double Z = 0.0;
  int z_sign = 0;

  static IKQuery from_point(const WorkspacePoint& p);
};

/// Coefficients c0..c4 (ascending) of the quartic P(t), t = tan(theta3 / 2).
using QuarticCoefficients = std::array<double, 5>;

/// The eliminant Q(theta3) = K^2 - 4 a1^2 (R - (s a3 sin theta3 + d2)^2) in
/// trigonometric form q0 + qc cos + qs sin + qc2 cos 2θ + qs2 sin 2θ, where s
/// is the sign of sin(alpha2). P(t) = (1 + t^2)^2 Q.
struct Eliminant {
  double q0 = 0.0, qc = 0.0, qs = 0.0, qc2 = 0.0, qs2 = 0.0;

  /// order-th derivative with respect to theta3.
  double value(double theta3, int order = 0) const;
  /// Sum of absolute trigonometric coefficients.
  double norm() const;
  QuarticCoefficients half_angle() const;
};

/// Precondition for the closed-form quartic: orthogonal chain with a1 > 0.
/// Throws AnalysisError(NotOrthogonal | ZeroA1).
void require_quartic_inverse(const ManipulatorModel& model);

Eliminant eliminant(const ManipulatorModel& model, double R, double Z);

QuarticCoefficients quartic_coefficients(const ManipulatorModel& model, const IKQuery& query);

/// d c_i / dR and d c_i / dZ of the quartic coefficients (they are quadratic
/// in R and Z).
struct QuarticSensitivity {
  QuarticCoefficients d_R{};
  QuarticCoefficients d_Z{};
};
QuarticSensitivity quartic_sensitivity(const ManipulatorModel& model, double R, double Z);

/// A real root of the eliminant with its multiplicity.
struct EliminantRoot {
  double theta3 = 0.0;
  int multiplicity = 1;
};

/// Real roots of Q(theta3) on the circle; multiple roots are merged when the
/// cluster's mean annihilates Q and its first m-1 derivatives.
std::vector<EliminantRoot> eliminant_roots(const Eliminant& q);

struct IKSolution {
  JointConfig config;
  int multiplicity = 1;
  double residual = 0.0;
  /// tan(theta3 / 2); infinite for theta3 = pi.
  double t = 0.0;
  /// Target on the first joint axis: theta1 arbitrary, reported as 0.
  bool free_theta1 = false;
  /// Wrist centre on the second joint axis: theta2 arbitrary, reported as 0.
  bool free_theta2 = false;
};

/// All inverse kinematic solutions of an orthogonal chain, sorted by theta3.
std::vector<IKSolution> solve_ik(const ManipulatorModel& model, const WorkspacePoint& p);

struct IKCount {
  int distinct = 0;
  /// Multiplicities of the distinct solutions, descending.
  std::vector<int> multiplicities;

  int total() const;
};

IKCount count_ik(const ManipulatorModel& model, const WorkspacePoint& p);

/// Residual gate for a simple root: 1e-8 times the chain's length scale.
double ik_tolerance(const ManipulatorModel& model);

}  // namespace cuspidal
