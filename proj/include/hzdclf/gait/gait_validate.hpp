#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hzdclf/gait/gait_library.hpp"
#include "hzdclf/models/cb5.hpp"

namespace hzdclf {

// Kinematic reconstruction of a full pose from gait data: outputs y, base
// position relative to the stance foot, spring deflections, and the world
// anchor of the stance foot. Uses the positive-knee branch and neutral-spring
// leg lines; the swing spring only enters through its own coordinate.
Eigen::VectorXd cb5PoseFromOutputs(const Cb5Model& model, Side stance, const Eigen::Vector4d& y,
                                   const Eigen::Vector2d& p_base, double spring_stance,
                                   double spring_swing,
                                   const Eigen::Vector2d& stance_anchor = Eigen::Vector2d::Zero());

// Companion velocity reconstruction: least squares over output rates, pinned
// stance contact, locked swing spring, a given stance-spring rate and the
// base velocity.
Eigen::VectorXd cb5VelocityFromOutputs(const Cb5Model& model, Side stance,
                                       const Eigen::VectorXd& q, const Eigen::Vector4d& ydot,
                                       const Eigen::Vector2d& v_base, double spring_rate_stance);

struct GaitValidationThresholds {
  double max_boundary_position_error = 1e-3;  // outputs at the next step start
  double max_boundary_velocity_error = 5e-2;
  double min_normal_force = 20.0;    // newtons, over the whole step
  double min_friction_margin = 0.0;  // pyramid margin, >= 0 keeps the wrench inside
  double min_peak_clearance = 0.01;  // meters of swing-foot lift
  double torque_limit = 80.0;
  int phase_samples = 101;
};

struct GaitValidationReport {
  bool ok = false;
  double boundary_position_error = 0.0;  // -1 when no pre-impact state is stored
  double boundary_velocity_error = 0.0;
  double min_normal_force = 0.0;
  double min_friction_margin = 0.0;
  double peak_clearance = 0.0;
  double max_torque = 0.0;
  std::vector<std::string> messages;
};

// Report-only checks of one canonical right-stance node: hybrid-invariance
// residual through the impact map (when the node stores its pre-impact
// state), reaction-force admissibility, torque margins and swing clearance.
GaitValidationReport validateGait(const Cb5Model& model, const GaitNode& node,
                                  const GaitValidationThresholds& thresholds = {});

}  // namespace hzdclf
