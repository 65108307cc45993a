#pragma once

#include <Eigen/Dense>

#include "hzdclf/clf/res_clf.hpp"
#include "hzdclf/dynamics/contact.hpp"
#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/numeric/qp.hpp"
#include "hzdclf/outputs/output_set.hpp"

namespace hzdclf {

// Solution of a program over the stacked decision vector x = (qdd, u, lambda).
struct WholeBodyResult {
  Eigen::VectorXd x;
  int nq = 0;
  int nu = 0;
  int nl = 0;
  QpStatus status = QpStatus::kInfeasible;
  double objective = 0.0;
  double clf_margin = 0.0;  // -(Vdot + (gamma/eps) V); only when a CLF is involved
  double delta = 0.0;       // hinge slack when the penalized decay term is on
  int iterations = 0;
  double solve_time = 0.0;

  Eigen::VectorXd qdd() const { return x.head(nq); }
  Eigen::VectorXd u() const { return x.segment(nq, nu); }
  Eigen::VectorXd lambda() const { return x.tail(nl); }
};

struct WholeBodyOptions {
  double torque_limit = 0.0;       // symmetric box on the torque block; 0 disables
  bool admissibility_rows = true;  // friction/unilateral rows on contact wrenches
  ContactLimits limits;
  // Diagonal added to the Hessian so externally supplied costs that are only
  // positive semidefinite still give a strictly convex program.
  double tikhonov = 1e-8;
};

// Inverse-dynamics tracking QP:
//   min  || J_y qdd + Jdot_y qd - ydd ||^2 (+ tikhonov ||x||^2)
//   s.t. D qdd + H = B u + Jc' lambda,  Jc qdd + Jcdot qd = 0, (+ rows, box)
// ydd is the full target output acceleration.
WholeBodyResult idQp(const RobotModel& model, const OutputSet& outputs,
                     const ConstraintSet& constraints, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qd, const Eigen::VectorXd& ydd,
                     const WholeBodyOptions& options = {});

// CLF QP in the full decision space: caller-supplied strictly convex cost
// 1/2 x' Q_id x + c_id' x subject to the same dynamics equalities plus the
// exponential decay row on the acceleration block.
WholeBodyResult idClfQp(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                        const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qd, const Eigen::MatrixXd& q_id,
                        const Eigen::VectorXd& c_id, const WholeBodyOptions& options = {});

// Affine parameterization of the dynamics equalities: every feasible point
// satisfies x = A u + b, so any cost over x reduces to a torque-space cost
// with identical minimizers.
struct AffineInputMap {
  Eigen::MatrixXd A;  // (nq + nu + nl) x nu
  Eigen::VectorXd b;
};
AffineInputMap inputParameterization(const RobotModel& model, const ConstraintSet& constraints,
                                     const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

struct ReducedQp {
  Eigen::MatrixXd hessian;   // A' Q_id A
  Eigen::VectorXd gradient;  // A' (Q_id b + c_id)
  double constant = 0.0;     // 1/2 b' Q_id b + c_id' b
};
ReducedQp reduceToInputSpace(const Eigen::MatrixXd& q_id, const Eigen::VectorXd& c_id,
                             const AffineInputMap& map);

// Tracking controller built on the projected dynamics. The hard constraint
// set is eliminated exactly; the soft set keeps its wrenches as decision
// variables, with weighted acceleration residuals in the cost (zero-weight
// rows drop out of both the cost and the null-space projection used by the
// tracking rows, which is what keeps the nominal trajectory a fixed point
// when a soft coordinate accelerates along it). The decay condition enters
// as a linear Vdot term scaled by w_vdot rather than as an inequality;
// hard_clf_row switches the inequality back on for analysis runs.
struct TrackingQpSetup {
  ConstraintSet hard;
  ConstraintSet soft;
  Eigen::VectorXd w_reg_x;      // strictly positive, one entry per variable
  Eigen::VectorXd w_soft_rows;  // one entry per soft-set row
  double w_y = 1.42;
  double w_vdot = 1.40;
  double torque_limit = 0.0;
  bool admissibility_rows = true;
  ContactLimits limits;
  bool hard_clf_row = false;
  // Penalized hinge on the decay row: adds w_hinge * max(row - rhs, 0)^2
  // through one bounded slack variable. Off at zero.
  double w_hinge = 0.0;
};

WholeBodyResult trackingQp(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                           const TrackingQpSetup& setup, double t, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qd, const Eigen::VectorXd& x_star,
                           QpSolver* solver = nullptr,
                           const Eigen::VectorXd* warm_start = nullptr);

// Output Jacobian restricted to motions the weighted soft rows allow:
// J_perp = J_y (I - Js^+ Js) and the matching bias rate, using only soft rows
// with positive weight.
struct ProjectedOutputRows {
  Eigen::MatrixXd jacobian;      // J_perp
  Eigen::VectorXd bias;          // Jdot_perp qd = Jdot_y qd - J_y Js^+ Jsdot qd
  Eigen::MatrixXd js;            // the rows projected against
  Eigen::VectorXd js_bias;       // their Jsdot qd
};
ProjectedOutputRows projectedOutputRows(const OutputSet& outputs, const ConstraintSet& soft,
                                        const Eigen::VectorXd& w_soft_rows,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

}  // namespace hzdclf
