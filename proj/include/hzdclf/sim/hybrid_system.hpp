#pragma once

#include <Eigen/Dense>

#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/models/cb5.hpp"

namespace hzdclf {

// One single-support phase of the compliant biped: the stance foot pinned at
// its anchor, the swing-leg spring locked at rest, the stance spring free.
// The guard is the swing-foot height, taken only while descending and only
// after the foot has been armed by clearing kArmHeight.
class Cb5WalkingDomain {
 public:
  Cb5WalkingDomain(const Cb5Model& model, Side stance, const Eigen::Vector2d& anchor);

  const Cb5Model& model() const { return *model_; }
  Side stance() const { return stance_; }
  Side swing() const { return otherSide(stance_); }
  const Eigen::Vector2d& anchor() const { return anchor_; }
  const ConstraintSet& constraints() const { return constraints_; }

  double guardValue(const Eigen::VectorXd& q) const;
  double guardRate(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  static constexpr double kArmHeight = 0.005;

 private:
  const Cb5Model* model_;
  Side stance_;
  Eigen::Vector2d anchor_;
  ConstraintSet constraints_;
};

struct DomainTransition {
  ImpactResult impact;
  Cb5WalkingDomain next;
  double impact_speed = 0.0;  // swing-foot vertical velocity at touchdown
};

// Plastic impact at the guard: the swing springs snap to rest (they are held
// there by their lock anyway), the touching foot becomes the new stance
// contact with its anchor dropped onto the ground line, both springs lock for
// the impact instant, and the spring deflections restart at zero.
DomainTransition stepTransition(const Cb5WalkingDomain& domain, const Eigen::VectorXd& q_minus,
                                const Eigen::VectorXd& qd_minus);

// Constraint set used by the impact map of stepTransition (new stance contact
// plus both spring locks), exposed for analysis code.
ConstraintSet impactConstraintSet(const Cb5Model& model, Side new_stance,
                                  const Eigen::Vector2d& new_anchor);

}  // namespace hzdclf
