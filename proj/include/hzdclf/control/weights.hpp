#pragma once

#include <Eigen/Dense>
#include <json.hpp>

namespace hzdclf {

// Cost and constraint weights of the whole-body controller, kept in the
// shape they are tabulated: per-block vectors for the regularizer (base and
// per-leg accelerations, per-leg torques, reaction forces) and scalars for
// the tracking, soft-constraint and Lyapunov-derivative terms. The CLF
// weights are the diagonal of Q (position block then velocity block) and R.
//
// Defaults below are the planar biped's set; bipedWeights3d() carries the
// 3D robot's published table, shipped as a config file for reference.
struct ControllerWeights {
  Eigen::VectorXd clf_q_position;  // one entry per output
  Eigen::VectorXd clf_q_velocity;
  Eigen::VectorXd clf_r;
  double epsilon = 0.1;

  Eigen::VectorXd w_reg_qdd_base;    // floating-base acceleration block
  Eigen::VectorXd w_reg_qdd_leg_st;  // stance-leg acceleration block
  Eigen::VectorXd w_reg_qdd_leg_sw;  // swing-leg acceleration block
  Eigen::VectorXd w_reg_u_st;        // stance-leg torque block
  Eigen::VectorXd w_reg_u_sw;        // swing-leg torque block
  Eigen::VectorXd w_reg_grf;         // reaction-wrench block
  double w_reg_springforce = 1.0;    // stance spring wrench entry

  Eigen::VectorXd w_grf;            // soft contact-acceleration row weights
  double w_static_spring = 0.0;     // soft spring-acceleration row weight
  double w_y = 1.42;                // output tracking rows
  double w_vdot = 1.40;             // linear Vdot cost term

  double rho = 1.0e4;        // relaxation penalty of the slack variant
  double friction_mu = 0.6;
  double torque_limit = 80.0;  // symmetric box; 0 disables

  int numOutputs() const { return static_cast<int>(clf_r.size()); }
};

// Planar-biped defaults (4 outputs, 3 base coordinates, 3 per-leg
// coordinates, 2 torques per leg, planar point-contact wrench).
ControllerWeights cb5Weights();

// The 3D biped's published weight table (9 outputs, 6 base coordinates,
// 8 per-leg coordinates, 5 torques per leg, line-contact wrench).
ControllerWeights bipedWeights3d();

nlohmann::json weightsToJson(const ControllerWeights& w);
ControllerWeights weightsFromJson(const nlohmann::json& j, const std::string& where);

}  // namespace hzdclf
