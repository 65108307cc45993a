#include "hzdclf/control/walking_controller.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hzdclf/control/controllers.hpp"
#include "hzdclf/errors.hpp"

namespace hzdclf {
namespace {

WalkingControllerConfig normalizeConfig(WalkingControllerConfig config) {
  if (config.weights.clf_r.size() == 0) config.weights = cb5Weights();
  return config;
}

ResClf buildClf(const ControllerWeights& w) {
  return ResClf::buildDiagonal(w.clf_q_position, w.clf_q_velocity, w.clf_r, w.epsilon);
}

Eigen::VectorXd evalBlock(const Eigen::MatrixXd& alpha, double duration, double tau) {
  return bezierEval(BezierCurve{alpha, duration}, tau);
}

}  // namespace

const char* controlLawName(ControlLaw law) {
  switch (law) {
    case ControlLaw::kTrackingQp: return "tracking-qp";
    case ControlLaw::kFbl: return "fbl";
    case ControlLaw::kClfQp: return "clf-qp";
    case ControlLaw::kClfQpDelta: return "clf-qp-delta";
    case ControlLaw::kIdQp: return "id-qp";
  }
  return "unknown";
}

ControlLaw controlLawFromName(const std::string& name) {
  if (name == "tracking-qp") return ControlLaw::kTrackingQp;
  if (name == "fbl") return ControlLaw::kFbl;
  if (name == "clf-qp") return ControlLaw::kClfQp;
  if (name == "clf-qp-delta") return ControlLaw::kClfQpDelta;
  if (name == "id-qp") return ControlLaw::kIdQp;
  throw ConfigError("unknown control law '" + name + "'");
}

WalkingController::WalkingController(const Cb5Model& model, GaitLibrary library,
                                     WalkingControllerConfig config)
    : model_(&model),
      library_(std::move(library)),
      config_(normalizeConfig(std::move(config))),
      clf_(buildClf(config_.weights)) {
  if (config_.weights.numOutputs() != 4) {
    throw InvalidArgumentError("the planar walking controller expects four outputs");
  }
  if (config_.weights.w_grf.size() != 2) {
    throw InvalidArgumentError("planar contact wants two soft reaction-row weights");
  }
}

void WalkingController::setCommand(double vx, double vy) {
  config_.command_vx = vx;
  config_.command_vy = vy;
}

Eigen::VectorXd WalkingController::regWeights(Side stance) const {
  const ControllerWeights& w = config_.weights;
  if (w.w_reg_qdd_base.size() != 3 || w.w_reg_qdd_leg_st.size() != 3 ||
      w.w_reg_qdd_leg_sw.size() != 3 || w.w_reg_u_st.size() != 2 || w.w_reg_u_sw.size() != 2 ||
      w.w_reg_grf.size() != 2) {
    throw InvalidArgumentError("regularizer weight blocks do not fit the planar biped");
  }
  Eigen::VectorXd reg(16);
  reg.segment<3>(0) = w.w_reg_qdd_base;
  reg.segment<3>(3) = stance == Side::kLeft ? w.w_reg_qdd_leg_st : w.w_reg_qdd_leg_sw;
  reg.segment<3>(6) = stance == Side::kRight ? w.w_reg_qdd_leg_st : w.w_reg_qdd_leg_sw;
  reg.segment<2>(9) = stance == Side::kLeft ? w.w_reg_u_st : w.w_reg_u_sw;
  reg.segment<2>(11) = stance == Side::kRight ? w.w_reg_u_st : w.w_reg_u_sw;
  reg.segment<2>(13) = w.w_reg_grf;
  reg(15) = w.w_reg_springforce;
  return reg;
}

Eigen::VectorXd WalkingController::referenceStack(double tau, Side /*stance*/) const {
  Eigen::VectorXd x_star(16);
  x_star.segment<9>(0) = evalBlock(node_.alpha_qdd, node_.duration, tau);
  x_star.segment<4>(9) = evalBlock(node_.alpha_u, node_.duration, tau);
  x_star.segment<3>(13) = evalBlock(node_.alpha_lambda, node_.duration, tau);
  return x_star;
}

void WalkingController::beginStep(const Cb5WalkingDomain& domain, double t0,
                                  const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  stance_ = domain.stance();
  anchor_ = domain.anchor();
  domain_constraints_ = domain.constraints();

  if (in_step_) {
    const double span = std::max(t0 - step_t0_, 1e-9);
    reg_.vbar_prev = (q.head<2>() - step_start_base_) / span;
    reg_.has_history = true;
  }
  step_t0_ = t0;
  step_start_base_ = q.head<2>();
  in_step_ = true;
  last_control_t_ = t0;

  const double query_vx = reg_.has_history ? reg_.vbar_prev.x() : config_.command_vx;
  const double query_vy = reg_.has_history ? reg_.vbar_prev.y() : config_.command_vy;
  GaitQuery query = library_.interpolate(query_vx, query_vy);
  query_clamped_ = query.clamped;
  node_ = stance_ == Side::kLeft ? cb5MirrorNode(query.node) : std::move(query.node);

  OutputSet nominal(*model_, stance_, node_.outputCurve(), t0);
  outputs_.emplace(nominal.withDesired(enforceHybridInvariance(nominal, q, qd)));

  std::vector<HolonomicConstraint> hard;
  hard.push_back(model_->jointLockConstraint("spring_lock_swing",
                                             Cb5Model::springCoord(otherSide(stance_)), 0.0));
  std::vector<HolonomicConstraint> soft;
  soft.push_back(model_->contactConstraint(Cb5Model::footMarker(stance_), anchor_));
  soft.push_back(
      model_->jointLockConstraint("spring_lock_stance", Cb5Model::springCoord(stance_), 0.0));

  setup_ = TrackingQpSetup{};
  setup_.hard = ConstraintSet(std::move(hard));
  setup_.soft = ConstraintSet(std::move(soft));
  setup_.w_reg_x = regWeights(stance_);
  Eigen::VectorXd w_soft(3);
  w_soft << config_.weights.w_grf(0), config_.weights.w_grf(1), config_.weights.w_static_spring;
  setup_.w_soft_rows = w_soft;
  setup_.w_y = config_.weights.w_y;
  setup_.w_vdot = config_.weights.w_vdot;
  setup_.torque_limit = config_.weights.torque_limit;
  setup_.admissibility_rows = true;
  setup_.limits.friction_mu = config_.weights.friction_mu;
  setup_.hard_clf_row = config_.hard_clf_row;
  setup_.w_hinge = config_.w_hinge;

  solver_.resetWarmStart();
  warm_start_.reset();
  last_was_fallback_ = false;
}

Eigen::VectorXd WalkingController::solveLaw(double t, const Eigen::VectorXd& q,
                                            const Eigen::VectorXd& qd, const OutputSet& outputs,
                                            const Eigen::VectorXd& x_star) {
  const ControllerWeights& w = config_.weights;
  switch (config_.law) {
    case ControlLaw::kTrackingQp: {
      const WholeBodyResult r =
          trackingQp(*model_, outputs, clf_, setup_, t, q, qd, x_star, &solver_,
                     warm_start_ ? &*warm_start_ : nullptr);
      tick_.status = r.status;
      tick_.clf_margin = r.clf_margin;
      tick_.delta = r.delta;
      tick_.solve_time = r.solve_time;
      tick_.iterations = r.iterations;
      tick_.lambda = r.lambda();
      if (r.status != QpStatus::kOptimal) {
        throw SolverError("tracking program did not reach an optimum");
      }
      warm_start_ = r.x;
      return r.u();
    }
    case ControlLaw::kFbl: {
      const OutputState err = outputError(outputs, t, q, qd);
      Eigen::VectorXd u = feedbackLinearizingTorque(*model_, outputs, domain_constraints_, t, q,
                                                    qd, clfFeedback(clf_, err.eta()));
      if (w.torque_limit > 0.0) {
        u = u.cwiseMax(-w.torque_limit).cwiseMin(w.torque_limit);
      }
      tick_.status = QpStatus::kOptimal;
      tick_.clf_margin = 0.0;
      tick_.delta = 0.0;
      tick_.solve_time = 0.0;
      tick_.iterations = 0;
      tick_.lambda.resize(0);
      return u;
    }
    case ControlLaw::kClfQp:
    case ControlLaw::kClfQpDelta: {
      ClfQpOptions options;
      options.torque_limit = w.torque_limit;
      const TorqueResult r =
          config_.law == ControlLaw::kClfQp
              ? clfQpTorque(*model_, outputs, clf_, domain_constraints_, t, q, qd, options)
              : clfQpDeltaTorque(*model_, outputs, clf_, domain_constraints_, t, q, qd, w.rho,
                                 options);
      tick_.status = r.status;
      tick_.clf_margin = r.clf_margin;
      tick_.delta = r.delta;
      tick_.solve_time = 0.0;
      tick_.iterations = r.iterations;
      tick_.lambda.resize(0);
      if (r.status != QpStatus::kOptimal) {
        throw SolverError("torque program did not reach an optimum");
      }
      return r.u;
    }
    case ControlLaw::kIdQp: {
      const OutputState err = outputError(outputs, t, q, qd);
      const Eigen::VectorXd ydd_cmd =
          outputs.desiredAccel(outputs.phase(t)) + clfFeedback(clf_, err.eta());
      WholeBodyOptions options;
      options.torque_limit = w.torque_limit;
      options.limits.friction_mu = w.friction_mu;
      const WholeBodyResult r =
          idQp(*model_, outputs, domain_constraints_, q, qd, ydd_cmd, options);
      tick_.status = r.status;
      tick_.clf_margin = 0.0;
      tick_.delta = 0.0;
      tick_.solve_time = r.solve_time;
      tick_.iterations = r.iterations;
      tick_.lambda = r.lambda();
      if (r.status != QpStatus::kOptimal) {
        throw SolverError("inverse-dynamics program did not reach an optimum");
      }
      return r.u();
    }
  }
  throw InvalidArgumentError("unhandled control law");
}

Eigen::VectorXd WalkingController::torque(double t, const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& qd) {
  if (!outputs_) throw InvalidArgumentError("torque called before beginStep");
  const double dt_tick = std::max(t - last_control_t_, 0.0);
  last_control_t_ = t;

  const PhasePoint phase = outputs_->phase(t);
  const double tau = phase.tau;

  const Eigen::Vector2d p_star = evalBlock(node_.alpha_p, node_.duration, tau).head<2>();
  const Eigen::Vector2d v_star = evalBlock(node_.alpha_v, node_.duration, tau).head<2>();
  const Eigen::Vector2d p_act = q.head<2>() - anchor_;
  const Eigen::Vector2d v_act = qd.head<2>();
  const Eigen::Vector2d v_des(config_.command_vx, config_.command_vy);

  const Eigen::Vector2d v_tilde = blendedVelocity(reg_, v_act, v_star);
  if (config_.footstrike_regulator && dt_tick > 0.0) {
    integrateVelocityError(reg_, config_.regulators, v_tilde, v_des, dt_tick);
  }

  // Per-tick reference: the repaired step curve, swing target shifted by the
  // footstrike regulator.
  OutputSet active = *outputs_;
  if (config_.footstrike_regulator) {
    const Eigen::Vector2d delta = footstrikeOffset(reg_, config_.regulators, v_tilde, v_des);
    if (std::abs(delta.x()) > 1e-12) {
      active = outputs_->withDesired(retargetSwingFootstrike(outputs_->desired(), delta.x()));
    }
  }

  Eigen::VectorXd x_star = referenceStack(tau, stance_);
  if (config_.velocity_regulator) {
    const Eigen::Vector2d accel =
        velocityRegulatorAccel(config_.regulators, p_act - p_star, v_tilde, v_des);
    x_star(Cb5Model::kBaseX) += accel.x();
  }
  const OutputState err = outputError(active, t, q, qd);
  if (config_.force_regulator) {
    const double trim = forceRegulatorDelta(config_.regulators, err.y(1), err.ydot(1), p_act.x(),
                                            v_des.x(), v_tilde.x());
    x_star.segment<2>(13) += trim * stanceForceDirection(*model_, q, stance_);
  }

  Eigen::VectorXd u;
  bool fallback = false;
  try {
    u = solveLaw(t, q, qd, active, x_star);
  } catch (const SolverError&) {
    fallback = true;
    if (last_good_u_ && !last_was_fallback_) {
      u = *last_good_u_;
    } else {
      u = Eigen::VectorXd::Zero(model_->numActuators());
    }
  }

  tick_.t = t;
  tick_.tau = tau;
  tick_.u = u;
  tick_.eta = err.eta();
  tick_.lyapunov = clf_.value(tick_.eta);
  tick_.fallback = fallback;
  if (fallback) {
    tick_.status = QpStatus::kInfeasible;
    tick_.clf_margin = 0.0;
    tick_.delta = 0.0;
    tick_.solve_time = 0.0;
    tick_.iterations = 0;
  } else {
    last_good_u_ = u;
  }
  last_was_fallback_ = fallback;
  return u;
}

FeedforwardPolicy::FeedforwardPolicy(const Cb5Model& model, GaitNode canonical_right)
    : model_(&model), canonical_(std::move(canonical_right)), active_(canonical_) {}

void FeedforwardPolicy::beginStep(const Cb5WalkingDomain& domain, double t0,
                                  const Eigen::VectorXd& /*q*/, const Eigen::VectorXd& /*qd*/) {
  active_ = domain.stance() == Side::kLeft ? cb5MirrorNode(canonical_) : canonical_;
  step_t0_ = t0;
}

Eigen::VectorXd FeedforwardPolicy::torque(double t, const Eigen::VectorXd& /*q*/,
                                          const Eigen::VectorXd& /*qd*/) {
  const PhasePoint phase = phaseAt(t, step_t0_, active_.duration);
  tick_ = TickInfo{};
  tick_.t = t;
  tick_.tau = phase.tau;
  tick_.u = bezierEval(BezierCurve{active_.alpha_u, active_.duration}, phase.tau);
  return tick_.u;
}

}  // namespace hzdclf
