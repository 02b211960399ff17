#include "cuspidal/kinematics.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cuspidal {

ArmPoint arm_point(const ManipulatorModel& model, double theta2, double theta3) {
  const DHParams& p = model.params();
  const double ca1 = model.cos_alpha1(), sa1 = model.sin_alpha1();
  const double ca2 = model.cos_alpha2(), sa2 = model.sin_alpha2();
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  const double c3 = std::cos(theta3), s3 = std::sin(theta3);

  // Wrist chain expressed in frame 2.
  const double x3 = p.a2 + p.a3 * c3;
  const double y3 = ca2 * p.a3 * s3 - p.d3 * sa2;
  const double z3 = sa2 * p.a3 * s3 + p.d3 * ca2;
  const double dx3 = -p.a3 * s3;
  const double dy3 = ca2 * p.a3 * c3;
  const double dz3 = sa2 * p.a3 * c3;

  const double w = s2 * x3 + c2 * y3;
  const double v = c2 * x3 - s2 * y3;

  ArmPoint out;
  out.position = {v + p.a1, ca1 * w - sa1 * z3 - sa1 * p.d2, sa1 * w + ca1 * z3 + ca1 * p.d2};
  out.d_theta2 = {-w, ca1 * v, sa1 * v};
  const double dv = c2 * dx3 - s2 * dy3;
  const double dw = s2 * dx3 + c2 * dy3;
  out.d_theta3 = {dv, ca1 * dw - sa1 * dz3, sa1 * dw + ca1 * dz3};
  return out;
}

WorkspacePoint forward(const ManipulatorModel& model, const JointConfig& q) {
  const ArmPoint arm = arm_point(model, q.theta2, q.theta3);
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1);
  const Eigen::Vector3d& h = arm.position;
  return {c1 * h.x() - s1 * h.y(), s1 * h.x() + c1 * h.y(), h.z()};
}

CrossSectionPoint cross_section(const WorkspacePoint& p) {
  return {std::hypot(p.x, p.y), p.z};
}

Eigen::Matrix3d jacobian(const ManipulatorModel& model, const JointConfig& q) {
  const ArmPoint arm = arm_point(model, q.theta2, q.theta3);
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1);
  Eigen::Matrix3d rot;
  rot << c1, -s1, 0.0, s1, c1, 0.0, 0.0, 0.0, 1.0;
  const Eigen::Vector3d p = rot * arm.position;
  Eigen::Matrix3d j;
  j.col(0) = Eigen::Vector3d(-p.y(), p.x(), 0.0);
  j.col(1) = rot * arm.d_theta2;
  j.col(2) = rot * arm.d_theta3;
  return j;
}

double det_jacobian(const ManipulatorModel& model, double theta2, double theta3) {
  const ArmPoint arm = arm_point(model, theta2, theta3);
  const Eigen::Vector3d col0(-arm.position.y(), arm.position.x(), 0.0);
  return col0.dot(arm.d_theta2.cross(arm.d_theta3));
}

double det_first_factor(const ManipulatorModel& model, double theta3) {
  const DHParams& p = model.params();
  return p.a2 + std::cos(theta3) * p.a3;
}

double det_second_factor(const ManipulatorModel& model, double theta2, double theta3) {
  const DHParams& p = model.params();
  const double s3 = std::sin(theta3), c3 = std::cos(theta3);
  return std::cos(theta2) * (s3 * p.a2 - model.sin_alpha2() * c3 * p.d2) + s3 * p.a1;
}

double det_jacobian_reduced(const ManipulatorModel& model, double theta2, double theta3) {
  if (!model.closed_form_determinant()) return det_jacobian(model, theta2, theta3);
  return -model.sin_alpha1() * det_first_factor(model, theta3) *
         det_second_factor(model, theta2, theta3);
}

}  // namespace cuspidal
