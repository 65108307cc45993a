#include "hzdclf/outputs/output_set.hpp"

#include "hzdclf/errors.hpp"

namespace hzdclf {

Eigen::VectorXd OutputState::eta() const {
  Eigen::VectorXd out(y.size() + ydot.size());
  out << y, ydot;
  return out;
}

OutputSet::OutputSet(const Cb5Model& model, Side stance, BezierCurve desired, double step_start)
    : model_(&model), stance_(stance), desired_(std::move(desired)), step_start_(step_start) {
  if (desired_.rows() != 4) throw InvalidArgumentError("output reference needs four rows");
  if (desired_.degree() != 6) throw InvalidArgumentError("output reference must be degree six");
  if (!(desired_.duration > 0.0)) throw InvalidArgumentError("step duration must be positive");
}

OutputSet OutputSet::withDesired(BezierCurve desired) const {
  return OutputSet(*model_, stance_, std::move(desired), step_start_);
}

OutputSet OutputSet::withStepStart(double step_start) const {
  return OutputSet(*model_, stance_, desired_, step_start);
}

Eigen::VectorXd OutputSet::actual(const Eigen::VectorXd& q) const {
  const int hip_sw = Cb5Model::hipCoord(swingSide());
  const int knee_st = Cb5Model::kneeCoord(stance_);
  const int knee_sw = Cb5Model::kneeCoord(swingSide());

  Eigen::VectorXd y(4);
  y(0) = q(Cb5Model::kTorsoPitch);
  y(1) = model_->legLength(q(knee_st));
  y(2) = model_->legLength(q(knee_sw));
  y(3) = q(Cb5Model::kTorsoPitch) + q(hip_sw) + model_->legPitchOffset(q(knee_sw));
  return y;
}

Eigen::MatrixXd OutputSet::jacobian(const Eigen::VectorXd& q) const {
  const int hip_sw = Cb5Model::hipCoord(swingSide());
  const int knee_st = Cb5Model::kneeCoord(stance_);
  const int knee_sw = Cb5Model::kneeCoord(swingSide());

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, model_->numPositions());
  j(0, Cb5Model::kTorsoPitch) = 1.0;
  j(1, knee_st) = model_->legLengthDerivative(q(knee_st));
  j(2, knee_sw) = model_->legLengthDerivative(q(knee_sw));
  j(3, Cb5Model::kTorsoPitch) = 1.0;
  j(3, hip_sw) = 1.0;
  j(3, knee_sw) = model_->legPitchOffsetDerivative(q(knee_sw));
  return j;
}

Eigen::VectorXd OutputSet::jdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  const int knee_st = Cb5Model::kneeCoord(stance_);
  const int knee_sw = Cb5Model::kneeCoord(swingSide());
  const double wk_st = qd(knee_st);
  const double wk_sw = qd(knee_sw);

  Eigen::VectorXd out(4);
  out(0) = 0.0;
  out(1) = model_->legLengthSecondDerivative(q(knee_st)) * wk_st * wk_st;
  out(2) = model_->legLengthSecondDerivative(q(knee_sw)) * wk_sw * wk_sw;
  out(3) = model_->legPitchOffsetSecondDerivative(q(knee_sw)) * wk_sw * wk_sw;
  return out;
}

PhasePoint OutputSet::phase(double t) const { return phaseAt(t, step_start_, desired_.duration); }

Eigen::VectorXd OutputSet::desiredValue(const PhasePoint& p) const {
  return bezierEval(desired_, p.tau);
}

Eigen::VectorXd OutputSet::desiredRate(const PhasePoint& p) const {
  if (p.clamped) return Eigen::VectorXd::Zero(4);
  return bezierDeriv(desired_, p.tau);
}

Eigen::VectorXd OutputSet::desiredAccel(const PhasePoint& p) const {
  if (p.clamped) return Eigen::VectorXd::Zero(4);
  return bezierDeriv2(desired_, p.tau);
}

OutputState outputError(const OutputSet& outputs, double t, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qd) {
  const PhasePoint p = outputs.phase(t);
  OutputState s;
  s.tau = p.tau;
  s.clamped = p.clamped;
  s.y = outputs.actual(q) - outputs.desiredValue(p);
  s.ydot = outputs.jacobian(q) * qd - outputs.desiredRate(p);
  return s;
}

BezierCurve enforceHybridInvariance(const OutputSet& outputs, const Eigen::VectorXd& q_plus,
                                    const Eigen::VectorXd& qd_plus) {
  BezierCurve curve = outputs.desired();
  const double degree = curve.degree();
  const Eigen::VectorXd y0 = outputs.actual(q_plus);
  const Eigen::VectorXd yd0 = outputs.jacobian(q_plus) * qd_plus;
  curve.coefficients.col(0) = y0;
  curve.coefficients.col(1) = y0 + (curve.duration / degree) * yd0;
  return curve;
}

}  // namespace hzdclf
