#pragma once

#include <Eigen/Dense>

#include "hzdclf/clf/res_clf.hpp"
#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/numeric/qp.hpp"
#include "hzdclf/outputs/output_set.hpp"

namespace hzdclf {

// LQR feedback of the scaled Riccati solution,
//   nu = -(1/eps) R^-1 G' P_eps eta,
// which splits into -Kp y / eps^2 - Kd ydot / eps for the unscaled gains.
Eigen::VectorXd clfFeedback(const ResClf& clf, const Eigen::VectorXd& eta);

// Exact input-output linearization: u = A^-1 (nu + ydd_desired - drift), so
// the closed loop obeys ydd_err = nu. Throws SolverError when the decoupling
// matrix is near singular (the message carries its condition number).
Eigen::VectorXd feedbackLinearizingTorque(const RobotModel& model, const OutputSet& outputs,
                                          const ConstraintSet& constraints, double t,
                                          const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                          const Eigen::VectorXd& nu);

// Least-squares acceleration reference realizing the auxiliary input:
// qdd = J_y^+ (nu + ydd_desired - Jdot_y qd).
Eigen::VectorXd outputAccelTarget(const OutputSet& outputs, double t, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qd, const Eigen::VectorXd& nu);

struct ExactInverseDynamics {
  Eigen::VectorXd qdd;
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
};

// The unique (qdd, u, lambda) satisfying the equations of motion, the
// constraint accelerations and J_y qdd + Jdot_y qd = ydd. Requires as many
// actuators as outputs; the torque block reproduces the feedback-linearizing
// torque for ydd = nu + ydd_desired, which is what makes acceleration-space
// and torque-space formulations interchangeable.
ExactInverseDynamics outputInverseDynamics(const RobotModel& model, const OutputSet& outputs,
                                           const ConstraintSet& constraints,
                                           const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                           const Eigen::VectorXd& ydd);

struct ClfQpOptions {
  double torque_limit = 0.0;    // symmetric box on u; 0 disables
  Eigen::MatrixXd extra_ineq;   // optional rows C u <= d
  Eigen::VectorXd extra_rhs;
};

struct TorqueResult {
  Eigen::VectorXd u;
  QpStatus status = QpStatus::kOptimal;
  double objective = 0.0;
  double delta = 0.0;       // relaxation slack (zero for the strict variant)
  double clf_margin = 0.0;  // -(Vdot + (gamma/eps) V) at the returned torque
  int iterations = 0;
};

// Pointwise min-norm-style QP in torque space:
//   min_u ||A u + (drift - ydd_desired)||^2
//   s.t.  L_F V + L_G V ydd_err(u) <= -(gamma/eps) V   (+ box, + extra rows)
// Whenever the decay row is inactive the minimizer is the exact linearizing
// torque with nu = 0.
TorqueResult clfQpTorque(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                         const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qd, const ClfQpOptions& options = {});

// Relaxed variant: the decay row softens to <= rhs + delta with rho delta^2
// added to the cost. delta stays zero whenever the strict problem is
// feasible and turns positive exactly when it is not.
TorqueResult clfQpDeltaTorque(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                              const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd, double rho,
                              const ClfQpOptions& options = {});

}  // namespace hzdclf
