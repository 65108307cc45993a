#pragma once

#include <Eigen/Dense>

#include "hzdclf/models/cb5.hpp"
#include "hzdclf/outputs/bezier.hpp"

namespace hzdclf {

// Output errors and rates at one instant, eta = (y, ydot).
struct OutputState {
  Eigen::VectorXd y;
  Eigen::VectorXd ydot;
  double tau = 0.0;
  bool clamped = false;

  Eigen::VectorXd eta() const;
};

// Virtual constraints of the compliant biped for one stance period: four
// relative-degree-two outputs paired with a Bezier reference in a time-based
// phase. Actual outputs, in order:
//   0 torso pitch,
//   1 stance-leg neutral length (knee-only, spring at rest),
//   2 swing-leg neutral length,
//   3 swing-leg absolute pitch.
// All four are joint-space expressions, so the Jacobian rows are sparse and
// exact; the spring columns are zero by construction.
class OutputSet {
 public:
  OutputSet(const Cb5Model& model, Side stance, BezierCurve desired, double step_start);

  int numOutputs() const { return 4; }
  const Cb5Model& model() const { return *model_; }
  Side stanceSide() const { return stance_; }
  Side swingSide() const { return otherSide(stance_); }
  double stepStart() const { return step_start_; }
  double stepDuration() const { return desired_.duration; }
  const BezierCurve& desired() const { return desired_; }

  OutputSet withDesired(BezierCurve desired) const;
  OutputSet withStepStart(double step_start) const;

  Eigen::VectorXd actual(const Eigen::VectorXd& q) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& q) const;
  Eigen::VectorXd jdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  PhasePoint phase(double t) const;
  Eigen::VectorXd desiredValue(const PhasePoint& p) const;
  // Chain rule through the clamped phase: zero rate and acceleration while
  // the phase holds at an endpoint.
  Eigen::VectorXd desiredRate(const PhasePoint& p) const;
  Eigen::VectorXd desiredAccel(const PhasePoint& p) const;

 private:
  const Cb5Model* model_;
  Side stance_;
  BezierCurve desired_;
  double step_start_;
};

// y = y_a(q) - y_d(tau), ydot = J_y qd - yd_dot.
OutputState outputError(const OutputSet& outputs, double t, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qd);

// Boundary-coefficient update making the reference start exactly on the
// post-impact state: alpha'_0 = y_a(q+), alpha'_1 = alpha'_0 +
// (T/M) J_y(q+) qd+. Idempotent; the interior coefficients are untouched.
BezierCurve enforceHybridInvariance(const OutputSet& outputs, const Eigen::VectorXd& q_plus,
                                    const Eigen::VectorXd& qd_plus);

}  // namespace hzdclf
