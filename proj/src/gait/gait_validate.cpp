#include "hzdclf/gait/gait_validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hzdclf/dynamics/contact.hpp"
#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/errors.hpp"
#include "hzdclf/outputs/output_set.hpp"

namespace hzdclf {
namespace {

double kneeFromLength(const Cb5Model& model, double length) {
  const double a = model.parameters().thigh_length;
  const double b = model.parameters().shin_length;
  const double c = (length * length - a * a - b * b) / (2.0 * a * b);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

Eigen::VectorXd cb5PoseFromOutputs(const Cb5Model& model, Side stance, const Eigen::Vector4d& y,
                                   const Eigen::Vector2d& p_base, double spring_stance,
                                   double spring_swing, const Eigen::Vector2d& stance_anchor) {
  const Side swing = otherSide(stance);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(9);
  q(Cb5Model::kTorsoPitch) = y(0);

  const double knee_st = kneeFromLength(model, y(1));
  const double knee_sw = kneeFromLength(model, y(2));
  q(Cb5Model::kneeCoord(stance)) = knee_st;
  q(Cb5Model::kneeCoord(swing)) = knee_sw;
  q(Cb5Model::springCoord(stance)) = spring_stance;
  q(Cb5Model::springCoord(swing)) = spring_swing;

  // Base relative to the stance foot fixes the stance leg-line pitch; the
  // swing side comes straight from the absolute pitch output.
  const double pitch_st = std::atan2(-p_base.x(), p_base.y());
  q(Cb5Model::hipCoord(stance)) = pitch_st - y(0) - model.legPitchOffset(knee_st);
  q(Cb5Model::hipCoord(swing)) = y(3) - y(0) - model.legPitchOffset(knee_sw);

  q(Cb5Model::kBaseX) = stance_anchor.x() + p_base.x();
  q(Cb5Model::kBaseZ) = stance_anchor.y() + p_base.y();
  return q;
}

Eigen::VectorXd cb5VelocityFromOutputs(const Cb5Model& model, Side stance,
                                       const Eigen::VectorXd& q, const Eigen::Vector4d& ydot,
                                       const Eigen::Vector2d& v_base, double spring_rate_stance) {
  if (q.size() != 9) throw InvalidArgumentError("cb5VelocityFromOutputs: q must have 9 entries");
  const Side swing = otherSide(stance);
  OutputSet outputs(model, stance,
                    BezierCurve{Eigen::MatrixXd::Zero(4, 7), 1.0}, 0.0);

  Eigen::MatrixXd rows(10, 9);
  Eigen::VectorXd rhs(10);
  rows.topRows(4) = outputs.jacobian(q);
  rhs.head(4) = ydot;
  rows.block(4, 0, 2, 9) = model.markerJacobian(q, Cb5Model::footMarker(stance));
  rhs.segment(4, 2).setZero();
  rows.row(6).setZero();
  rows(6, Cb5Model::springCoord(swing)) = 1.0;
  rhs(6) = 0.0;
  rows.row(7).setZero();
  rows(7, Cb5Model::springCoord(stance)) = 1.0;
  rhs(7) = spring_rate_stance;
  rows.block(8, 0, 2, 9).setZero();
  rows(8, Cb5Model::kBaseX) = 1.0;
  rows(9, Cb5Model::kBaseZ) = 1.0;
  rhs.segment(8, 2) = v_base;

  return rows.colPivHouseholderQr().solve(rhs);
}

GaitValidationReport validateGait(const Cb5Model& model, const GaitNode& node,
                                  const GaitValidationThresholds& thresholds) {
  GaitValidationReport report;
  bool ok = true;
  const int samples = std::max(thresholds.phase_samples, 2);
  const double mu = model.parameters().friction_mu;

  // Boundary residual through the impact: only possible when the node stores
  // its pre-impact state.
  if (node.x_preimpact.size() == 18) {
    Eigen::VectorXd q_minus = node.x_preimpact.head(9);
    Eigen::VectorXd qd_minus = node.x_preimpact.tail(9);
    q_minus(Cb5Model::kLeftSpring) = 0.0;  // swing side of a right-stance step
    qd_minus(Cb5Model::kLeftSpring) = 0.0;

    ConstraintSet post;
    post.add(model.contactConstraint(Cb5Model::footMarker(Side::kLeft),
                                     model.markerPosition(q_minus, "foot_left")));
    post.add(model.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, 0.0));
    post.add(model.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring, 0.0));
    const ImpactResult impact = impactMap(model, q_minus, qd_minus, post);

    OutputSet next(model, Side::kLeft, node.outputCurve(), 0.0);
    const Eigen::VectorXd y_err = next.actual(impact.q_plus) - node.alpha_y.col(0);
    const Eigen::VectorXd yd_err =
        next.jacobian(impact.q_plus) * impact.qd_plus - bezierDeriv(node.outputCurve(), 0.0);
    report.boundary_position_error = y_err.cwiseAbs().maxCoeff();
    report.boundary_velocity_error = yd_err.cwiseAbs().maxCoeff();
    if (report.boundary_position_error > thresholds.max_boundary_position_error) {
      ok = false;
      report.messages.push_back("boundary position residual exceeds the threshold");
    }
    if (report.boundary_velocity_error > thresholds.max_boundary_velocity_error) {
      ok = false;
      report.messages.push_back("boundary velocity residual exceeds the threshold");
    }
  } else {
    report.boundary_position_error = -1.0;
    report.boundary_velocity_error = -1.0;
    report.messages.push_back("no pre-impact state stored; boundary residual skipped");
  }

  report.min_normal_force = std::numeric_limits<double>::infinity();
  report.min_friction_margin = std::numeric_limits<double>::infinity();
  report.peak_clearance = -std::numeric_limits<double>::infinity();
  report.max_torque = 0.0;

  const BezierCurve u_curve{node.alpha_u, node.duration};
  const BezierCurve lambda_curve{node.alpha_lambda, node.duration};
  const BezierCurve y_curve = node.outputCurve();
  const BezierCurve p_curve{node.alpha_p, node.duration};

  for (int k = 0; k < samples; ++k) {
    const double tau = static_cast<double>(k) / (samples - 1);

    const Eigen::VectorXd u = bezierEval(u_curve, tau);
    report.max_torque = std::max(report.max_torque, u.cwiseAbs().maxCoeff());

    const Eigen::VectorXd lambda = bezierEval(lambda_curve, tau);
    if (lambda.size() >= 2) {
      const AdmissibilityReport adm =
          contactAdmissibility(lambda.head(2), WrenchLayout::kPointPlanar, {mu, 0.0});
      report.min_normal_force = std::min(report.min_normal_force, lambda(1));
      report.min_friction_margin = std::min(report.min_friction_margin, adm.worst);
    }

    const Eigen::Vector4d y = bezierEval(y_curve, tau);
    const Eigen::Vector2d p = bezierEval(p_curve, tau);
    const Eigen::VectorXd q = cb5PoseFromOutputs(model, Side::kRight, y, p, 0.0, 0.0);
    const double clearance = model.markerPosition(q, "foot_left").y();
    report.peak_clearance = std::max(report.peak_clearance, clearance);
  }

  if (report.min_normal_force < thresholds.min_normal_force) {
    ok = false;
    std::ostringstream msg;
    msg << "normal force dips to " << report.min_normal_force << " N";
    report.messages.push_back(msg.str());
  }
  if (report.min_friction_margin < thresholds.min_friction_margin) {
    ok = false;
    report.messages.push_back("reaction force leaves the friction pyramid");
  }
  if (report.peak_clearance < thresholds.min_peak_clearance) {
    ok = false;
    report.messages.push_back("swing foot never clears the ground");
  }
  if (report.max_torque > thresholds.torque_limit) {
    ok = false;
    report.messages.push_back("torque reference exceeds the limit");
  }

  report.ok = ok;
  return report;
}

}  // namespace hzdclf
