#include "hzdclf/sim/hybrid_system.hpp"

#include <vector>

namespace hzdclf {
namespace {

std::string springLockName(Side side) {
  return std::string("spring_lock_") + sideName(side);
}

}  // namespace

Cb5WalkingDomain::Cb5WalkingDomain(const Cb5Model& model, Side stance,
                                   const Eigen::Vector2d& anchor)
    : model_(&model), stance_(stance), anchor_(anchor) {
  std::vector<HolonomicConstraint> active;
  active.push_back(model.contactConstraint(Cb5Model::footMarker(stance), anchor));
  active.push_back(
      model.jointLockConstraint(springLockName(swing()), Cb5Model::springCoord(swing()), 0.0));
  constraints_ = ConstraintSet(std::move(active));
}

double Cb5WalkingDomain::guardValue(const Eigen::VectorXd& q) const {
  return model_->markerPosition(q, Cb5Model::footMarker(swing())).y();
}

double Cb5WalkingDomain::guardRate(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  return model_->markerVelocity(q, qd, Cb5Model::footMarker(swing())).y();
}

ConstraintSet impactConstraintSet(const Cb5Model& model, Side new_stance,
                                  const Eigen::Vector2d& new_anchor) {
  std::vector<HolonomicConstraint> active;
  active.push_back(model.contactConstraint(Cb5Model::footMarker(new_stance), new_anchor));
  active.push_back(
      model.jointLockConstraint(springLockName(Side::kLeft), Cb5Model::kLeftSpring, 0.0));
  active.push_back(
      model.jointLockConstraint(springLockName(Side::kRight), Cb5Model::kRightSpring, 0.0));
  return ConstraintSet(std::move(active));
}

DomainTransition stepTransition(const Cb5WalkingDomain& domain, const Eigen::VectorXd& q_minus,
                                const Eigen::VectorXd& qd_minus) {
  const Cb5Model& model = domain.model();
  const Side new_stance = domain.swing();

  // The swing spring is locked at rest all phase; clear the integration
  // residue before using the foot position as the new anchor.
  Eigen::VectorXd q_pre = q_minus;
  Eigen::VectorXd qd_pre = qd_minus;
  q_pre(Cb5Model::springCoord(new_stance)) = 0.0;
  qd_pre(Cb5Model::springCoord(new_stance)) = 0.0;

  const double impact_speed = domain.guardRate(q_pre, qd_pre);

  Eigen::Vector2d new_anchor = model.markerPosition(q_pre, Cb5Model::footMarker(new_stance));
  new_anchor.y() = 0.0;  // the guard fires at the ground line

  ImpactResult impact =
      impactMap(model, q_pre, qd_pre, impactConstraintSet(model, new_stance, new_anchor));

  return DomainTransition{std::move(impact), Cb5WalkingDomain(model, new_stance, new_anchor),
                          impact_speed};
}

}  // namespace hzdclf
