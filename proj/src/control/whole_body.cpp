#include "hzdclf/control/whole_body.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hzdclf/errors.hpp"
#include "hzdclf/numeric/linalg.hpp"

namespace hzdclf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DynamicsBlocks {
  Eigen::MatrixXd d;
  Eigen::VectorXd h;
  Eigen::MatrixXd b;
  Eigen::MatrixXd j_c;        // mc x n
  Eigen::VectorXd jdot_qdot;  // mc
};

DynamicsBlocks evalDynamics(const RobotModel& model, const ConstraintSet& constraints,
                            const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  DynamicsBlocks blocks;
  blocks.d = model.massMatrix(q);
  blocks.h = model.biasForces(q, qd);
  blocks.b = model.actuationMatrix();
  if (constraints.totalDim() > 0) {
    blocks.j_c = constraints.jacobian(q);
    blocks.jdot_qdot = constraints.jdotQdot(q, qd);
  } else {
    blocks.j_c.resize(0, model.numPositions());
    blocks.jdot_qdot.resize(0);
  }
  return blocks;
}

// Unilateral/friction rows of every contact in the set, acting on the
// matching sub-block of the stacked wrench. A lambda >= 0 convention.
void appendAdmissibilityRows(QpProblem& qp, const ConstraintSet& set, int lambda_offset,
                             int total_vars, const ContactLimits& limits) {
  for (int i = 0; i < set.size(); ++i) {
    const HolonomicConstraint& c = set[i];
    if (c.layout == WrenchLayout::kNone) continue;
    const Eigen::MatrixXd rows = admissibilityRows(c.layout, limits);
    const int base = static_cast<int>(qp.ineq_matrix.rows());
    qp.ineq_matrix.conservativeResize(base + rows.rows(), total_vars);
    qp.ineq_matrix.bottomRows(rows.rows()).setZero();
    qp.ineq_matrix.block(base, lambda_offset + set.rowOffset(i), rows.rows(), c.dim) = rows;
    qp.ineq_lower.conservativeResize(base + rows.rows());
    qp.ineq_upper.conservativeResize(base + rows.rows());
    qp.ineq_lower.tail(rows.rows()).setZero();
    qp.ineq_upper.tail(rows.rows()).setConstant(kInf);
  }
}

void applyTorqueBox(QpProblem& qp, int offset, int nu, double torque_limit) {
  if (torque_limit <= 0.0) return;
  const int n = qp.numVariables();
  qp.lb = Eigen::VectorXd::Constant(n, -kInf);
  qp.ub = Eigen::VectorXd::Constant(n, kInf);
  qp.lb.segment(offset, nu).setConstant(-torque_limit);
  qp.ub.segment(offset, nu).setConstant(torque_limit);
}

}  // namespace

AffineInputMap inputParameterization(const RobotModel& model, const ConstraintSet& constraints,
                                     const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int mc = constraints.totalDim();
  const DynamicsBlocks blocks = evalDynamics(model, constraints, q, qd);

  AffineInputMap map;
  map.A = Eigen::MatrixXd::Zero(n + nu + mc, nu);
  map.b = Eigen::VectorXd::Zero(n + nu + mc);
  map.A.block(n, 0, nu, nu).setIdentity();

  if (mc == 0) {
    const Eigen::LLT<Eigen::MatrixXd> llt(blocks.d);
    map.A.topRows(n) = llt.solve(blocks.b);
    map.b.head(n) = llt.solve(-blocks.h);
    return map;
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + mc, n + mc);
  kkt.topLeftCorner(n, n) = blocks.d;
  kkt.topRightCorner(n, mc) = -blocks.j_c.transpose();
  kkt.bottomLeftCorner(mc, n) = blocks.j_c;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw DegenerateConstraintError(constraints.names(),
                                    "inputParameterization: singular constrained dynamics for {" +
                                        constraints.names() + "}");
  }

  Eigen::MatrixXd rhs_u = Eigen::MatrixXd::Zero(n + mc, nu);
  rhs_u.topRows(n) = blocks.b;
  Eigen::VectorXd rhs_0 = Eigen::VectorXd::Zero(n + mc);
  rhs_0.head(n) = -blocks.h;
  rhs_0.tail(mc) = -blocks.jdot_qdot;

  const Eigen::MatrixXd sol_u = lu.solve(rhs_u);
  const Eigen::VectorXd sol_0 = lu.solve(rhs_0);
  map.A.topRows(n) = sol_u.topRows(n);
  map.A.bottomRows(mc) = sol_u.bottomRows(mc);
  map.b.head(n) = sol_0.head(n);
  map.b.tail(mc) = sol_0.tail(mc);
  return map;
}

ReducedQp reduceToInputSpace(const Eigen::MatrixXd& q_id, const Eigen::VectorXd& c_id,
                             const AffineInputMap& map) {
  if (q_id.rows() != map.A.rows() || q_id.cols() != map.A.rows() ||
      c_id.size() != map.A.rows()) {
    throw InvalidArgumentError("reduceToInputSpace: cost dimensions do not match the map");
  }
  ReducedQp reduced;
  reduced.hessian = map.A.transpose() * q_id * map.A;
  reduced.hessian = (0.5 * (reduced.hessian + reduced.hessian.transpose())).eval();
  reduced.gradient = map.A.transpose() * (q_id * map.b + c_id);
  reduced.constant = 0.5 * map.b.dot(q_id * map.b) + c_id.dot(map.b);
  return reduced;
}

WholeBodyResult idQp(const RobotModel& model, const OutputSet& outputs,
                     const ConstraintSet& constraints, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qd, const Eigen::VectorXd& ydd,
                     const WholeBodyOptions& options) {
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int mc = constraints.totalDim();
  const int dim = n + nu + mc;
  if (ydd.size() != outputs.numOutputs()) {
    throw InvalidArgumentError("idQp: ydd has wrong size");
  }
  const DynamicsBlocks blocks = evalDynamics(model, constraints, q, qd);
  const Eigen::MatrixXd j_y = outputs.jacobian(q);
  const Eigen::VectorXd target = ydd - outputs.jdotQdot(q, qd);

  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Identity(dim, dim) * options.tikhonov;
  qp.hessian.topLeftCorner(n, n) += 2.0 * j_y.transpose() * j_y;
  qp.gradient = Eigen::VectorXd::Zero(dim);
  qp.gradient.head(n) = -2.0 * j_y.transpose() * target;

  qp.eq_matrix = Eigen::MatrixXd::Zero(n + mc, dim);
  qp.eq_rhs = Eigen::VectorXd::Zero(n + mc);
  qp.eq_matrix.topLeftCorner(n, n) = blocks.d;
  qp.eq_matrix.block(0, n, n, nu) = -blocks.b;
  qp.eq_rhs.head(n) = -blocks.h;
  if (mc > 0) {
    qp.eq_matrix.block(0, n + nu, n, mc) = -blocks.j_c.transpose();
    qp.eq_matrix.block(n, 0, mc, n) = blocks.j_c;
    qp.eq_rhs.tail(mc) = -blocks.jdot_qdot;
  }

  qp.ineq_matrix.resize(0, dim);
  qp.ineq_lower.resize(0);
  qp.ineq_upper.resize(0);
  if (options.admissibility_rows) {
    appendAdmissibilityRows(qp, constraints, n + nu, dim, options.limits);
  }
  applyTorqueBox(qp, n, nu, options.torque_limit);

  QpSolver solver;
  const QpSolution sol = solver.solve(qp);

  WholeBodyResult result;
  result.nq = n;
  result.nu = nu;
  result.nl = mc;
  result.status = sol.status;
  result.iterations = sol.iterations;
  result.solve_time = sol.solve_time;
  if (sol.status != QpStatus::kOptimal) return result;
  result.x = sol.x;
  result.objective = sol.objective + target.squaredNorm();
  return result;
}

WholeBodyResult idClfQp(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                        const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qd, const Eigen::MatrixXd& q_id,
                        const Eigen::VectorXd& c_id, const WholeBodyOptions& options) {
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int mc = constraints.totalDim();
  const int dim = n + nu + mc;
  if (q_id.rows() != dim || q_id.cols() != dim || c_id.size() != dim) {
    throw InvalidArgumentError("idClfQp: cost dimensions do not match (qdd, u, lambda)");
  }
  const DynamicsBlocks blocks = evalDynamics(model, constraints, q, qd);

  QpProblem qp;
  qp.hessian = q_id + Eigen::MatrixXd::Identity(dim, dim) * options.tikhonov;
  qp.gradient = c_id;

  qp.eq_matrix = Eigen::MatrixXd::Zero(n + mc, dim);
  qp.eq_rhs = Eigen::VectorXd::Zero(n + mc);
  qp.eq_matrix.topLeftCorner(n, n) = blocks.d;
  qp.eq_matrix.block(0, n, n, nu) = -blocks.b;
  qp.eq_rhs.head(n) = -blocks.h;
  if (mc > 0) {
    qp.eq_matrix.block(0, n + nu, n, mc) = -blocks.j_c.transpose();
    qp.eq_matrix.block(n, 0, mc, n) = blocks.j_c;
    qp.eq_rhs.tail(mc) = -blocks.jdot_qdot;
  }

  const OutputState err = outputError(outputs, t, q, qd);
  const Eigen::VectorXd eta = err.eta();
  const PhasePoint phase = outputs.phase(t);
  const ClfRow row = clfConstraintRow(clf, eta, outputs.jacobian(q), outputs.jdotQdot(q, qd),
                                      outputs.desiredAccel(phase));
  const double row_norm = row.qdd_coeffs.norm();
  if (row_norm > 1e-12) {
    qp.ineq_matrix = Eigen::MatrixXd::Zero(1, dim);
    qp.ineq_matrix.leftCols(n) = row.qdd_coeffs / row_norm;
    qp.ineq_lower = Eigen::VectorXd::Constant(1, -kInf);
    qp.ineq_upper = Eigen::VectorXd::Constant(1, row.rhs / row_norm);
  } else {
    qp.ineq_matrix.resize(0, dim);
    qp.ineq_lower.resize(0);
    qp.ineq_upper.resize(0);
  }
  if (options.admissibility_rows) {
    appendAdmissibilityRows(qp, constraints, n + nu, dim, options.limits);
  }
  applyTorqueBox(qp, n, nu, options.torque_limit);

  QpSolver solver;
  const QpSolution sol = solver.solve(qp);

  WholeBodyResult result;
  result.nq = n;
  result.nu = nu;
  result.nl = mc;
  result.status = sol.status;
  result.iterations = sol.iterations;
  result.solve_time = sol.solve_time;
  if (sol.status != QpStatus::kOptimal) return result;
  result.x = sol.x;
  result.objective = sol.objective;
  result.clf_margin = row.rhs - row.qdd_coeffs.dot(sol.x.head(n));
  return result;
}

ProjectedOutputRows projectedOutputRows(const OutputSet& outputs, const ConstraintSet& soft,
                                        const Eigen::VectorXd& w_soft_rows,
                                        const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  if (w_soft_rows.size() != soft.totalDim()) {
    throw InvalidArgumentError("projectedOutputRows: one weight per soft row required");
  }
  ProjectedOutputRows rows;
  const Eigen::MatrixXd j_y = outputs.jacobian(q);
  const Eigen::VectorXd jdot_y = outputs.jdotQdot(q, qd);

  std::vector<int> active;
  for (int i = 0; i < w_soft_rows.size(); ++i) {
    if (w_soft_rows(i) > 0.0) active.push_back(i);
  }
  if (active.empty()) {
    rows.jacobian = j_y;
    rows.bias = jdot_y;
    rows.js.resize(0, q.size());
    rows.js_bias.resize(0);
    return rows;
  }

  const Eigen::MatrixXd js_full = soft.jacobian(q);
  const Eigen::VectorXd js_bias_full = soft.jdotQdot(q, qd);
  rows.js.resize(static_cast<int>(active.size()), q.size());
  rows.js_bias.resize(static_cast<int>(active.size()));
  for (size_t k = 0; k < active.size(); ++k) {
    rows.js.row(static_cast<int>(k)) = js_full.row(active[k]);
    rows.js_bias(static_cast<int>(k)) = js_bias_full(active[k]);
  }

  const Eigen::MatrixXd js_pinv = pseudoInverse(rows.js);
  rows.jacobian = j_y - j_y * js_pinv * rows.js;
  rows.bias = jdot_y - j_y * js_pinv * rows.js_bias;
  return rows;
}

WholeBodyResult trackingQp(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                           const TrackingQpSetup& setup, double t, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qd, const Eigen::VectorXd& x_star,
                           QpSolver* solver, const Eigen::VectorXd* warm_start) {
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int ms = setup.soft.totalDim();
  const int dim = n + nu + ms;
  if (x_star.size() != dim) {
    throw InvalidArgumentError("trackingQp: x_star must match (qdd, u, lambda_soft)");
  }
  if (setup.w_reg_x.size() != dim || (setup.w_reg_x.array() <= 0.0).any()) {
    throw InvalidArgumentError("trackingQp: w_reg_x must be strictly positive per variable");
  }
  if (setup.w_soft_rows.size() != ms) {
    throw InvalidArgumentError("trackingQp: one weight per soft-constraint row required");
  }

  const ProjectedDynamics pd = projectDynamics(model, q, qd, setup.hard, setup.soft);
  const OutputState err = outputError(outputs, t, q, qd);
  const Eigen::VectorXd eta = err.eta();
  const PhasePoint phase = outputs.phase(t);
  const Eigen::VectorXd ydd_des = outputs.desiredAccel(phase);
  const ProjectedOutputRows perp = projectedOutputRows(outputs, setup.soft, setup.w_soft_rows, q, qd);

  const int my = outputs.numOutputs();
  const int n_soft_rows = static_cast<int>(perp.js.rows());
  const int n_cost_rows = dim + my + n_soft_rows;

  // Stacked least-squares rows C x = d: per-variable regularizer to the
  // reference point, projected tracking rows, weighted soft accelerations.
  Eigen::MatrixXd cost_rows = Eigen::MatrixXd::Zero(n_cost_rows, dim);
  Eigen::VectorXd cost_rhs = Eigen::VectorXd::Zero(n_cost_rows);
  cost_rows.topLeftCorner(dim, dim) = setup.w_reg_x.asDiagonal();
  cost_rhs.head(dim) = setup.w_reg_x.cwiseProduct(x_star);
  cost_rows.block(dim, 0, my, n) = setup.w_y * perp.jacobian;
  cost_rhs.segment(dim, my) = setup.w_y * (ydd_des - perp.bias);
  {
    int k = 0;
    for (int i = 0; i < setup.w_soft_rows.size(); ++i) {
      if (!(setup.w_soft_rows(i) > 0.0)) continue;
      cost_rows.block(dim + my + k, 0, 1, n) = setup.w_soft_rows(i) * perp.js.row(k);
      cost_rhs(dim + my + k) = -setup.w_soft_rows(i) * perp.js_bias(k);
      ++k;
    }
  }

  const ClfRow row = clfConstraintRow(clf, eta, outputs.jacobian(q), outputs.jdotQdot(q, qd),
                                      ydd_des);
  const double row_norm = row.qdd_coeffs.norm();
  const bool have_row = row_norm > 1e-12;
  const bool hinge = setup.w_hinge > 0.0 && have_row;
  const int total_vars = dim + (hinge ? 1 : 0);

  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Zero(total_vars, total_vars);
  qp.hessian.topLeftCorner(dim, dim) = 2.0 * cost_rows.transpose() * cost_rows;
  qp.gradient = Eigen::VectorXd::Zero(total_vars);
  qp.gradient.head(dim) = -2.0 * cost_rows.transpose() * cost_rhs;
  // Linear decay term: d/dt V along the tracking directions, cheap to add and
  // never harmful to the achieved decay.
  const Eigen::RowVectorXd lg_v = clf.lieDerivativeG(eta);
  qp.gradient.head(n) += setup.w_vdot * (lg_v * perp.jacobian).transpose();

  qp.eq_matrix = Eigen::MatrixXd::Zero(n, total_vars);
  qp.eq_matrix.topLeftCorner(n, n) = pd.mass;
  qp.eq_matrix.block(0, n, n, nu) = -pd.actuation;
  if (ms > 0) qp.eq_matrix.block(0, n + nu, n, ms) = -pd.soft_jacobian_t;
  qp.eq_rhs = -pd.bias;

  qp.ineq_matrix.resize(0, total_vars);
  qp.ineq_lower.resize(0);
  qp.ineq_upper.resize(0);
  if (setup.hard_clf_row && have_row) {
    qp.ineq_matrix.conservativeResize(1, total_vars);
    qp.ineq_matrix.setZero();
    qp.ineq_matrix.leftCols(n) = row.qdd_coeffs / row_norm;
    qp.ineq_lower = Eigen::VectorXd::Constant(1, -kInf);
    qp.ineq_upper = Eigen::VectorXd::Constant(1, row.rhs / row_norm);
  }
  if (hinge) {
    qp.hessian(dim, dim) = 2.0 * setup.w_hinge * row_norm * row_norm;
    const int base = static_cast<int>(qp.ineq_matrix.rows());
    qp.ineq_matrix.conservativeResize(base + 1, total_vars);
    qp.ineq_matrix.row(base).setZero();
    qp.ineq_matrix.row(base).head(n) = row.qdd_coeffs / row_norm;
    qp.ineq_matrix(base, dim) = -1.0;
    qp.ineq_lower.conservativeResize(base + 1);
    qp.ineq_upper.conservativeResize(base + 1);
    qp.ineq_lower(base) = -kInf;
    qp.ineq_upper(base) = row.rhs / row_norm;
  }
  if (setup.admissibility_rows) {
    appendAdmissibilityRows(qp, setup.soft, n + nu, total_vars, setup.limits);
  }
  applyTorqueBox(qp, n, nu, setup.torque_limit);
  if (hinge) {
    if (qp.lb.size() == 0) {
      qp.lb = Eigen::VectorXd::Constant(total_vars, -kInf);
      qp.ub = Eigen::VectorXd::Constant(total_vars, kInf);
    }
    qp.lb(dim) = 0.0;  // hinge slack is one-sided
  }

  QpSolver local;
  QpSolver& qp_solver = solver != nullptr ? *solver : local;
  std::optional<Eigen::VectorXd> seed;
  if (warm_start != nullptr && warm_start->size() == dim) {
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(total_vars);
    padded.head(dim) = *warm_start;
    seed = padded;
  }
  const QpSolution sol = qp_solver.solve(qp, seed);

  WholeBodyResult result;
  result.nq = n;
  result.nu = nu;
  result.nl = ms;
  result.status = sol.status;
  result.iterations = sol.iterations;
  result.solve_time = sol.solve_time;
  if (sol.status != QpStatus::kOptimal) return result;
  result.x = sol.x.head(dim);
  result.objective = sol.objective + cost_rhs.squaredNorm();
  if (have_row) {
    result.clf_margin = row.rhs - row.qdd_coeffs.dot(result.x.head(n));
    if (hinge) result.delta = sol.x(dim) * row_norm;
  } else {
    result.clf_margin = 0.0;
  }
  return result;
}

}  // namespace hzdclf
