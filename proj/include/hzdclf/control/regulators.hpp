#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "hzdclf/models/cb5.hpp"
#include "hzdclf/outputs/bezier.hpp"

namespace hzdclf {

// Step-to-step regulation around the nominal gait. Three layers, all acting
// on references rather than torques: a velocity regulator offsetting the
// nominal base accelerations, a footstrike regulator moving the swing-foot
// target (discrete PD plus a leaky integral on the velocity error), and a
// force regulator trimming the stance reaction force along the leg.
//
// Sagittal/lateral pairs are kept as 2-vectors; a planar robot simply uses
// component 0 and leaves the lateral entries inert.
struct RegulatorGains {
  Eigen::Vector2d k_qdd_p{2.0, 2.0};  // base acceleration per position error
  Eigen::Vector2d k_v{3.0, 3.0};      // base acceleration per velocity error

  Eigen::Vector2d kfs_p{0.045, 0.0375};  // footstrike per velocity error
  Eigen::Vector2d kfs_d{0.18, 0.21};     // footstrike per step-to-step change
  Eigen::Vector2d kfs_i{0.06, 0.0};      // footstrike per integrated error
  double integrator_leak = 0.9995;       // per-tick forgetting factor
  double integrator_clamp = 0.5;         // bound on |integral * gain|, meters

  double k_force_p = 1800.0;  // stance-length error to leg force
  double k_force_d = 22.0;
  // Velocity feedforward of the force trim, split by support progression:
  // (k1, k2) while the base trails the stance foot, (k3, k4) once past it.
  Eigen::Vector4d k_force_v{0.025, 0.04, 0.0075, 0.0};
  double force_x0 = 0.2;  // progression normalization length, meters
};

struct RegulatorState {
  Eigen::Vector2d integral = Eigen::Vector2d::Zero();
  Eigen::Vector2d vbar_prev = Eigen::Vector2d::Zero();  // last step's average velocity
  bool has_history = false;
};

// Blended velocity estimate: the previous step's average plus the in-step
// deviation from the nominal profile. Smooth within a step, updates its
// slow component only at impacts.
Eigen::Vector2d blendedVelocity(const RegulatorState& state, const Eigen::Vector2d& v_actual,
                                const Eigen::Vector2d& v_nominal);

// Leaky integral update, clamped so the integral's contribution to the
// footstrike offset never exceeds integrator_clamp.
void integrateVelocityError(RegulatorState& state, const RegulatorGains& gains,
                            const Eigen::Vector2d& v_tilde, const Eigen::Vector2d& v_desired,
                            double dt);

// Offset added to the nominal base acceleration reference.
Eigen::Vector2d velocityRegulatorAccel(const RegulatorGains& gains, const Eigen::Vector2d& p_error,
                                       const Eigen::Vector2d& v_tilde,
                                       const Eigen::Vector2d& v_desired);

// Horizontal footstrike offset.
Eigen::Vector2d footstrikeOffset(const RegulatorState& state, const RegulatorGains& gains,
                                 const Eigen::Vector2d& v_tilde, const Eigen::Vector2d& v_desired);

// Scalar force trim along the stance leg from the stance-length output error
// and the support progression x (base minus stance foot, meters).
double forceRegulatorDelta(const RegulatorGains& gains, double y_stance_length,
                           double ydot_stance_length, double x_progress, double vx_desired,
                           double vx_bar);

// Unit vector (in the contact wrench frame) along which a positive leg-force
// trim raises the normal reaction: from foot toward hip along the neutral
// leg axis (exact when the shin spring is at rest).
Eigen::Vector2d stanceForceDirection(const Cb5Model& model, const Eigen::VectorXd& q, Side stance);

// Retargets the swing-leg rows of a reference curve to land the swing foot
// `delta_x` further along. The nominal terminal foot-to-hip vector comes from
// the curve's own endpoint; both trailing coefficients of the swing-length
// and swing-pitch rows shift together, preserving terminal rates.
BezierCurve retargetSwingFootstrike(const BezierCurve& nominal, double delta_x);

nlohmann::json regulatorGainsToJson(const RegulatorGains& gains);
RegulatorGains regulatorGainsFromJson(const nlohmann::json& j, const std::string& where);

}  // namespace hzdclf
