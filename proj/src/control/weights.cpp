#include "hzdclf/control/weights.hpp"

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"

namespace hzdclf {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

ControllerWeights cb5Weights() {
  ControllerWeights w;
  w.clf_q_position = vec({200.0, 800.0, 800.0, 300.0});
  w.clf_q_velocity = vec({10.0, 40.0, 40.0, 15.0});
  w.clf_r = Eigen::VectorXd::Ones(4);
  w.epsilon = 0.1;

  w.w_reg_qdd_base = vec({0.01, 0.01, 0.01});
  w.w_reg_qdd_leg_st = vec({0.01, 0.01, 0.6});
  w.w_reg_qdd_leg_sw = vec({0.01, 0.01, 0.01});
  w.w_reg_u_st = vec({0.5, 0.1});
  w.w_reg_u_sw = vec({0.9, 0.8});
  w.w_reg_grf = vec({0.9, 0.1});
  w.w_reg_springforce = 1.0;

  w.w_grf = vec({1.0, 1.0});
  w.w_static_spring = 0.0;
  w.w_y = 1.42;
  w.w_vdot = 1.40;

  w.rho = 1.0e4;
  w.friction_mu = 0.6;
  w.torque_limit = 80.0;
  return w;
}

ControllerWeights bipedWeights3d() {
  ControllerWeights w;
  w.clf_q_position =
      vec({4600.0, 3640.0, 390.0, 4575.0, 8580.0, 4056.0, 1872.0, 520.0, 520.0});
  w.clf_q_velocity = vec({16.0, 7.3, 1.6, 56.0, 115.0, 28.8, 18.0, 15.0, 12.0});
  w.clf_r = vec({0.8, 1.0, 1.4, 0.7, 0.8, 1.0, 1.0, 1.4, 1.0});
  w.epsilon = 0.1;

  w.w_reg_qdd_base = Eigen::VectorXd::Constant(6, 0.01);
  w.w_reg_qdd_leg_st = vec({0.01, 0.01, 0.01, 0.01, 0.6, 0.01, 0.6, 0.01});
  w.w_reg_qdd_leg_sw = Eigen::VectorXd::Constant(8, 0.01);
  w.w_reg_u_st = vec({1.0, 0.9, 0.5, 0.1, 1.0});
  w.w_reg_u_sw = vec({1.0, 1.0, 0.9, 0.8, 1.0});
  w.w_reg_grf = vec({0.9, 0.1, 1.9, 1.3, 1.3});
  w.w_reg_springforce = 1.0;

  w.w_grf = vec({1.0, 1.0, 1.0, 1.3, 1.3});
  w.w_static_spring = 1.0;
  w.w_y = 1.42;
  w.w_vdot = 1.40;

  w.rho = 1.0e4;
  w.friction_mu = 0.6;
  w.torque_limit = 112.0;
  return w;
}

nlohmann::json weightsToJson(const ControllerWeights& w) {
  nlohmann::json j;
  j["Q_position"] = toJson(w.clf_q_position);
  j["Q_velocity"] = toJson(w.clf_q_velocity);
  j["R"] = toJson(w.clf_r);
  j["epsilon"] = w.epsilon;
  j["w_reg_qdd_base"] = toJson(w.w_reg_qdd_base);
  j["w_reg_qdd_leg_st"] = toJson(w.w_reg_qdd_leg_st);
  j["w_reg_qdd_leg_sw"] = toJson(w.w_reg_qdd_leg_sw);
  j["w_reg_u_st"] = toJson(w.w_reg_u_st);
  j["w_reg_u_sw"] = toJson(w.w_reg_u_sw);
  j["w_reg_grf"] = toJson(w.w_reg_grf);
  j["w_reg_springforce"] = w.w_reg_springforce;
  j["w_grf"] = toJson(w.w_grf);
  j["w_static_spring"] = w.w_static_spring;
  j["w_y"] = w.w_y;
  j["w_vdot"] = w.w_vdot;
  j["rho"] = w.rho;
  j["friction_mu"] = w.friction_mu;
  j["torque_limit"] = w.torque_limit;
  return j;
}

ControllerWeights weightsFromJson(const nlohmann::json& j, const std::string& where) {
  requireKeysIn(j,
                {"Q_position", "Q_velocity", "R", "epsilon", "w_reg_qdd_base",
                 "w_reg_qdd_leg_st", "w_reg_qdd_leg_sw", "w_reg_u_st", "w_reg_u_sw",
                 "w_reg_grf", "w_reg_springforce", "w_grf", "w_static_spring", "w_y",
                 "w_vdot", "rho", "friction_mu", "torque_limit"},
                where);
  ControllerWeights w;
  w.clf_q_position = vectorAt(j, "Q_position", where);
  w.clf_q_velocity = vectorAt(j, "Q_velocity", where);
  w.clf_r = vectorAt(j, "R", where);
  w.epsilon = numberAt(j, "epsilon", where);
  w.w_reg_qdd_base = vectorAt(j, "w_reg_qdd_base", where);
  w.w_reg_qdd_leg_st = vectorAt(j, "w_reg_qdd_leg_st", where);
  w.w_reg_qdd_leg_sw = vectorAt(j, "w_reg_qdd_leg_sw", where);
  w.w_reg_u_st = vectorAt(j, "w_reg_u_st", where);
  w.w_reg_u_sw = vectorAt(j, "w_reg_u_sw", where);
  w.w_reg_grf = vectorAt(j, "w_reg_grf", where);
  w.w_reg_springforce = numberAt(j, "w_reg_springforce", where);
  w.w_grf = vectorAt(j, "w_grf", where);
  w.w_static_spring = numberAt(j, "w_static_spring", where);
  w.w_y = numberAt(j, "w_y", where);
  w.w_vdot = numberAt(j, "w_vdot", where);
  w.rho = numberAt(j, "rho", where);
  w.friction_mu = numberAt(j, "friction_mu", where);
  w.torque_limit = numberAt(j, "torque_limit", where);
  if (w.clf_q_position.size() != w.clf_q_velocity.size() ||
      w.clf_q_position.size() != w.clf_r.size()) {
    throw ConfigError(where + ": Q_position, Q_velocity and R must have equal sizes");
  }
  if (w.epsilon <= 0.0) throw ConfigError(where + ": epsilon must be positive");
  return w;
}

}  // namespace hzdclf
