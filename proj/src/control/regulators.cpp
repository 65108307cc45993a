#include "hzdclf/control/regulators.hpp"

#include <algorithm>
#include <cmath>

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"

namespace hzdclf {

Eigen::Vector2d blendedVelocity(const RegulatorState& state, const Eigen::Vector2d& v_actual,
                                const Eigen::Vector2d& v_nominal) {
  if (!state.has_history) return v_actual;
  return state.vbar_prev + (v_actual - v_nominal);
}

void integrateVelocityError(RegulatorState& state, const RegulatorGains& gains,
                            const Eigen::Vector2d& v_tilde, const Eigen::Vector2d& v_desired,
                            double dt) {
  if (dt < 0.0) throw InvalidArgumentError("integrateVelocityError: negative dt");
  state.integral = gains.integrator_leak * state.integral + dt * (v_tilde - v_desired);
  for (int i = 0; i < 2; ++i) {
    const double gain = std::abs(gains.kfs_i(i));
    if (gain <= 0.0) continue;
    const double bound = gains.integrator_clamp / gain;
    state.integral(i) = std::clamp(state.integral(i), -bound, bound);
  }
}

Eigen::Vector2d velocityRegulatorAccel(const RegulatorGains& gains, const Eigen::Vector2d& p_error,
                                       const Eigen::Vector2d& v_tilde,
                                       const Eigen::Vector2d& v_desired) {
  return gains.k_qdd_p.cwiseProduct(p_error) + gains.k_v.cwiseProduct(v_tilde - v_desired);
}

Eigen::Vector2d footstrikeOffset(const RegulatorState& state, const RegulatorGains& gains,
                                 const Eigen::Vector2d& v_tilde, const Eigen::Vector2d& v_desired) {
  Eigen::Vector2d delta = gains.kfs_p.cwiseProduct(v_tilde - v_desired);
  if (state.has_history) {
    delta += gains.kfs_d.cwiseProduct(v_tilde - state.vbar_prev);
  }
  delta += gains.kfs_i.cwiseProduct(state.integral);
  return delta;
}

double forceRegulatorDelta(const RegulatorGains& gains, double y_stance_length,
                           double ydot_stance_length, double x_progress, double vx_desired,
                           double vx_bar) {
  double delta = -gains.k_force_p * y_stance_length - gains.k_force_d * ydot_stance_length;
  const double x0 = gains.force_x0 > 0.0 ? gains.force_x0 : 1.0;
  const double s = x_progress / x0;
  if (x_progress <= 0.0) {
    delta += (gains.k_force_v(0) * vx_desired + gains.k_force_v(1) * (vx_desired - vx_bar)) * s;
  } else {
    delta += (gains.k_force_v(2) * vx_desired + gains.k_force_v(3) * (vx_desired - vx_bar)) * s;
  }
  return delta;
}

Eigen::Vector2d stanceForceDirection(const Cb5Model& model, const Eigen::VectorXd& q, Side stance) {
  const double pitch = q(Cb5Model::kTorsoPitch) + q(Cb5Model::hipCoord(stance)) +
                       model.legPitchOffset(q(Cb5Model::kneeCoord(stance)));
  return Eigen::Vector2d(-std::sin(pitch), std::cos(pitch));
}

BezierCurve retargetSwingFootstrike(const BezierCurve& nominal, double delta_x) {
  if (nominal.rows() != 4) {
    throw InvalidArgumentError("retargetSwingFootstrike: expected the four-output reference");
  }
  const int last = nominal.degree();
  const double len = nominal.coefficients(2, last);
  const double pitch = nominal.coefficients(3, last);
  const Eigen::Vector2d p_nominal(len * std::sin(pitch), -len * std::cos(pitch));
  const Eigen::Vector2d p(p_nominal.x() + delta_x, p_nominal.y());

  const double new_len = std::max(p.norm(), 1e-6);
  const double new_pitch = std::asin(std::clamp(p.x() / new_len, -1.0, 1.0));

  BezierCurve out = nominal;
  for (int c = last - 1; c <= last; ++c) {
    out.coefficients(2, c) += new_len - len;
    out.coefficients(3, c) += new_pitch - pitch;
  }
  return out;
}

nlohmann::json regulatorGainsToJson(const RegulatorGains& gains) {
  nlohmann::json j;
  j["k_qdd_p"] = toJson(Eigen::VectorXd(gains.k_qdd_p));
  j["k_v"] = toJson(Eigen::VectorXd(gains.k_v));
  j["kfs_p"] = toJson(Eigen::VectorXd(gains.kfs_p));
  j["kfs_d"] = toJson(Eigen::VectorXd(gains.kfs_d));
  j["kfs_i"] = toJson(Eigen::VectorXd(gains.kfs_i));
  j["integrator_leak"] = gains.integrator_leak;
  j["integrator_clamp"] = gains.integrator_clamp;
  j["k_force_p"] = gains.k_force_p;
  j["k_force_d"] = gains.k_force_d;
  j["k_force_v"] = toJson(Eigen::VectorXd(gains.k_force_v));
  j["force_x0"] = gains.force_x0;
  return j;
}

RegulatorGains regulatorGainsFromJson(const nlohmann::json& j, const std::string& where) {
  requireKeysIn(j,
                {"k_qdd_p", "k_v", "kfs_p", "kfs_d", "kfs_i", "integrator_leak",
                 "integrator_clamp", "k_force_p", "k_force_d", "k_force_v", "force_x0"},
                where);
  RegulatorGains gains;
  gains.k_qdd_p = vectorAt(j, "k_qdd_p", where, 2);
  gains.k_v = vectorAt(j, "k_v", where, 2);
  gains.kfs_p = vectorAt(j, "kfs_p", where, 2);
  gains.kfs_d = vectorAt(j, "kfs_d", where, 2);
  gains.kfs_i = vectorAt(j, "kfs_i", where, 2);
  gains.integrator_leak = numberAt(j, "integrator_leak", where);
  gains.integrator_clamp = numberAt(j, "integrator_clamp", where);
  gains.k_force_p = numberAt(j, "k_force_p", where);
  gains.k_force_d = numberAt(j, "k_force_d", where);
  gains.k_force_v = vectorAt(j, "k_force_v", where, 4);
  gains.force_x0 = numberAt(j, "force_x0", where);
  return gains;
}

}  // namespace hzdclf
