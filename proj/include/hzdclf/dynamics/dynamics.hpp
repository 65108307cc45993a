#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hzdclf/dynamics/constraint.hpp"
#include "hzdclf/dynamics/robot_model.hpp"

namespace hzdclf {

// Velocity-level drift correction added to the acceleration constraint:
//   J qddot + Jdot qd = -2*sigma*(J qd) - sigma^2 * c(q).
// Off by default; the fixed-step integrator holds drift well below test
// tolerances without it.
struct BaumgarteParams {
  double sigma = 20.0;
};

struct ConstrainedDynamics {
  Eigen::VectorXd qdd;
  Eigen::VectorXd lambda;  // stacked multipliers, constraint-set row order
};

// Solves the index-1 DAE
//   [D  -J'] [qdd   ]   [B u - H ]
//   [J   0 ] [lambda] = [-Jdot qd]
// by one dense factorization. Throws DegenerateConstraintError (naming the
// offending constraints) when J loses row rank.
ConstrainedDynamics constrainedForwardDynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                               const Eigen::VectorXd& qd, const Eigen::VectorXd& u,
                                               const ConstraintSet& constraints,
                                               const std::optional<BaumgarteParams>& stabilization =
                                                   std::nullopt);

// Closed-form multipliers lambda = (J D^-1 J')^-1 (J D^-1 (H - B u) - Jdot qd)
// without solving for qdd. Matches the KKT path to solver precision.
Eigen::VectorXd constraintForces(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd, const Eigen::VectorXd& u,
                                 const ConstraintSet& constraints);

struct ImpactResult {
  Eigen::VectorXd q_plus;
  Eigen::VectorXd qd_plus;
  Eigen::VectorXd impulse;  // integrated contact impulse over the instant
};

// Plastic impact against the given post-impact constraint set followed by the
// model's position reset/relabel:
//   qd_mid = (I - D^-1 J' (J D^-1 J')^-1 J) qd_minus   at q_minus,
//   q_plus = resetPositions(q_minus), qd_plus = resetVelocityMap * qd_mid.
// The velocity projection is D-orthogonal, so it cannot increase kinetic
// energy.
ImpactResult impactMap(const RobotModel& model, const Eigen::VectorXd& q_minus,
                       const Eigen::VectorXd& qd_minus, const ConstraintSet& post_constraints);

struct ProjectedDynamics {
  Eigen::MatrixXd projector;        // P = I - Jc^+ Jc, onto motions feasible for the hard set
  Eigen::MatrixXd mass;             // D_c = D + P D - D P, invertible when Jc has full row rank
  Eigen::VectorXd bias;             // H_c = P H + D Jc^+ (Jcdot qd)
  Eigen::MatrixXd actuation;        // B_c = P B
  Eigen::MatrixXd soft_jacobian_t;  // P Js', n x 0 when no soft set is given
};

// Eliminates the hard-constraint multipliers from the dynamics. (qdd, u,
// lambda_soft) satisfies
//   D_c qdd + H_c = B_c u + (P Js') lambda_soft
// exactly when the original equations of motion hold for some hard multiplier
// and Jc qdd + Jcdot qd = 0. Applying the operator twice is a no-op.
ProjectedDynamics projectDynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qd, const ConstraintSet& hard,
                                  const ConstraintSet& soft = ConstraintSet());

}  // namespace hzdclf
