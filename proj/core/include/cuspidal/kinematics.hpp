#pragma once

#include <Eigen/Core>

#include "cuspidal/model.hpp"

namespace cuspidal {

struct WorkspacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Point of the half cross-section through the first joint axis.
struct CrossSectionPoint {
  double rho = 0.0;
  double z = 0.0;
};

/// End-tip position at theta1 = 0 together with its partial derivatives
/// with respect to theta2 and theta3.
struct ArmPoint {
  Eigen::Vector3d position;
  Eigen::Vector3d d_theta2;
  Eigen::Vector3d d_theta3;
};

ArmPoint arm_point(const ManipulatorModel& model, double theta2, double theta3);

WorkspacePoint forward(const ManipulatorModel& model, const JointConfig& q);

CrossSectionPoint cross_section(const WorkspacePoint& p);

/// Analytic Jacobian d(x,y,z)/d(theta1,theta2,theta3).
Eigen::Matrix3d jacobian(const ManipulatorModel& model, const JointConfig& q);

/// det J at theta1 = 0 (det J does not depend on theta1). Valid for any model.
double det_jacobian(const ManipulatorModel& model, double theta2, double theta3);

/// Closed-form factored determinant for orthogonal chains with d3 = 0:
///   -sign(sin alpha1) (a2 + c3 a3)(c2 (s3 a2 - sign(sin alpha2) c3 d2) + s3 a1),
/// which for the illustrative signs is exactly (a2 + c3 a3)(c2 (s3 a2 - c3 d2) + s3 a1).
/// The full determinant equals a3 times this value. Other models fall back to
/// det_jacobian(model, theta2, theta3).
double det_jacobian_reduced(const ManipulatorModel& model, double theta2, double theta3);

/// The two factors of the closed form; only meaningful when
/// model.closed_form_determinant() holds.
double det_first_factor(const ManipulatorModel& model, double theta3);
double det_second_factor(const ManipulatorModel& model, double theta2, double theta3);

}  // namespace cuspidal
