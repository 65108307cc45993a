#include "hzdclf/control/controllers.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "hzdclf/errors.hpp"
#include "hzdclf/numeric/linalg.hpp"

namespace hzdclf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void checkState(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  if (q.size() != model.numPositions() || qd.size() != model.numVelocities()) {
    throw InvalidArgumentError("controller: state dimension mismatch");
  }
}

// Shared pieces of the torque-space CLF programs.
struct LinearizedOutputs {
  OutputDynamics od;
  Eigen::VectorXd drift_err;  // drift - ydd_desired
  Eigen::VectorXd eta;
  double v = 0.0;
  double lf_v = 0.0;
  Eigen::RowVectorXd lg_v;
};

LinearizedOutputs linearize(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                            const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qd) {
  LinearizedOutputs lin;
  lin.od = outputDynamics(model, outputs, constraints, q, qd);
  const PhasePoint p = outputs.phase(t);
  lin.drift_err = lin.od.drift - outputs.desiredAccel(p);
  lin.eta = outputError(outputs, t, q, qd).eta();
  lin.v = clf.value(lin.eta);
  lin.lf_v = clf.lieDerivativeF(lin.eta);
  lin.lg_v = clf.lieDerivativeG(lin.eta);
  return lin;
}

void applyTorqueBox(QpProblem& qp, int nu, double torque_limit) {
  if (torque_limit <= 0.0) return;
  const int n = qp.numVariables();
  qp.lb = Eigen::VectorXd::Constant(n, -kInf);
  qp.ub = Eigen::VectorXd::Constant(n, kInf);
  qp.lb.head(nu).setConstant(-torque_limit);
  qp.ub.head(nu).setConstant(torque_limit);
}

void appendExtraRows(QpProblem& qp, const ClfQpOptions& options, int nu, int total_vars) {
  if (options.extra_ineq.size() == 0) return;
  if (options.extra_ineq.cols() != nu || options.extra_ineq.rows() != options.extra_rhs.size()) {
    throw InvalidArgumentError("clf qp: extra inequality dimensions do not match");
  }
  const int base = static_cast<int>(qp.ineq_matrix.rows());
  qp.ineq_matrix.conservativeResize(base + options.extra_ineq.rows(), total_vars);
  qp.ineq_matrix.bottomRows(options.extra_ineq.rows()).setZero();
  qp.ineq_matrix.bottomRows(options.extra_ineq.rows()).leftCols(nu) = options.extra_ineq;
  qp.ineq_lower.conservativeResize(base + options.extra_rhs.size());
  qp.ineq_upper.conservativeResize(base + options.extra_rhs.size());
  qp.ineq_lower.tail(options.extra_rhs.size()).setConstant(-kInf);
  qp.ineq_upper.tail(options.extra_rhs.size()) = options.extra_rhs;
}

}  // namespace

Eigen::VectorXd clfFeedback(const ResClf& clf, const Eigen::VectorXd& eta) {
  if (eta.size() != 2 * clf.numOutputs()) {
    throw InvalidArgumentError("clfFeedback: eta has wrong size");
  }
  const Eigen::VectorXd p_eta = clf.Peps() * eta;
  return -clf.R().llt().solve(p_eta.tail(clf.numOutputs())) / clf.epsilon();
}

Eigen::VectorXd feedbackLinearizingTorque(const RobotModel& model, const OutputSet& outputs,
                                          const ConstraintSet& constraints, double t,
                                          const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                          const Eigen::VectorXd& nu) {
  checkState(model, q, qd);
  if (nu.size() != outputs.numOutputs()) {
    throw InvalidArgumentError("feedbackLinearizingTorque: nu has wrong size");
  }
  const OutputDynamics od = outputDynamics(model, outputs, constraints, q, qd);
  const Eigen::VectorXd ydd_des = outputs.desiredAccel(outputs.phase(t));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(od.decoupling,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > smax * 1e-12)) {
    std::ostringstream msg;
    msg << "feedbackLinearizingTorque: decoupling matrix is singular (cond = "
        << (smin > 0.0 ? smax / smin : kInf) << ")";
    throw SolverError(msg.str());
  }
  return svd.solve(nu + ydd_des - od.drift);
}

Eigen::VectorXd outputAccelTarget(const OutputSet& outputs, double t, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qd, const Eigen::VectorXd& nu) {
  if (nu.size() != outputs.numOutputs()) {
    throw InvalidArgumentError("outputAccelTarget: nu has wrong size");
  }
  const Eigen::VectorXd ydd_des = outputs.desiredAccel(outputs.phase(t));
  const Eigen::MatrixXd j_y = outputs.jacobian(q);
  return pseudoInverse(j_y) * (nu + ydd_des - outputs.jdotQdot(q, qd));
}

ExactInverseDynamics outputInverseDynamics(const RobotModel& model, const OutputSet& outputs,
                                           const ConstraintSet& constraints,
                                           const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                           const Eigen::VectorXd& ydd) {
  checkState(model, q, qd);
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int my = outputs.numOutputs();
  const int mc = constraints.totalDim();
  if (ydd.size() != my) {
    throw InvalidArgumentError("outputInverseDynamics: ydd has wrong size");
  }
  if (nu != my) {
    throw InvalidArgumentError(
        "outputInverseDynamics: needs as many actuators as outputs for a square system");
  }

  const Eigen::MatrixXd d = model.massMatrix(q);
  const Eigen::VectorXd h = model.biasForces(q, qd);
  const Eigen::MatrixXd b = model.actuationMatrix();
  const Eigen::MatrixXd j_y = outputs.jacobian(q);

  const int dim = n + mc + my;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  kkt.topLeftCorner(n, n) = d;
  kkt.block(0, n, n, nu) = -b;
  rhs.head(n) = -h;
  if (mc > 0) {
    const Eigen::MatrixXd j_c = constraints.jacobian(q);
    kkt.block(0, n + nu, n, mc) = -j_c.transpose();
    kkt.block(n, 0, mc, n) = j_c;
    rhs.segment(n, mc) = -constraints.jdotQdot(q, qd);
  }
  kkt.block(n + mc, 0, my, n) = j_y;
  rhs.tail(my) = ydd - outputs.jdotQdot(q, qd);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw SolverError("outputInverseDynamics: the combined dynamics/output system is singular");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SolverError("outputInverseDynamics: non-finite solution");

  ExactInverseDynamics result;
  result.qdd = x.head(n);
  result.u = x.segment(n, nu);
  result.lambda = x.tail(mc);
  return result;
}

TorqueResult clfQpTorque(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                         const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qd, const ClfQpOptions& options) {
  checkState(model, q, qd);
  const int nu = model.numActuators();
  const LinearizedOutputs lin = linearize(model, outputs, clf, constraints, t, q, qd);
  const double rate = clf.gamma() / clf.epsilon();

  QpProblem qp;
  qp.hessian = 2.0 * lin.od.decoupling.transpose() * lin.od.decoupling;
  qp.gradient = 2.0 * lin.od.decoupling.transpose() * lin.drift_err;

  const Eigen::RowVectorXd row_u = lin.lg_v * lin.od.decoupling;
  const double row_rhs = -rate * lin.v - lin.lf_v - lin.lg_v.dot(lin.drift_err);
  const double row_norm = row_u.norm();
  if (row_norm > 1e-12) {
    qp.ineq_matrix = row_u / row_norm;
    qp.ineq_lower = Eigen::VectorXd::Constant(1, -kInf);
    qp.ineq_upper = Eigen::VectorXd::Constant(1, row_rhs / row_norm);
  } else {
    qp.ineq_matrix.resize(0, nu);
    qp.ineq_lower.resize(0);
    qp.ineq_upper.resize(0);
  }
  appendExtraRows(qp, options, nu, nu);
  applyTorqueBox(qp, nu, options.torque_limit);

  QpSolver solver;
  const QpSolution sol = solver.solve(qp);

  TorqueResult result;
  result.status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status != QpStatus::kOptimal) return result;
  result.u = sol.x;
  result.objective = sol.objective + lin.drift_err.squaredNorm();
  const double vdot = lin.lf_v + lin.lg_v.dot(lin.od.decoupling * sol.x + lin.drift_err);
  result.clf_margin = -(vdot + rate * lin.v);
  return result;
}

TorqueResult clfQpDeltaTorque(const RobotModel& model, const OutputSet& outputs, const ResClf& clf,
                              const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd, double rho, const ClfQpOptions& options) {
  checkState(model, q, qd);
  if (rho <= 0.0) throw InvalidArgumentError("clfQpDeltaTorque: rho must be positive");
  const int nu = model.numActuators();
  const LinearizedOutputs lin = linearize(model, outputs, clf, constraints, t, q, qd);
  const double rate = clf.gamma() / clf.epsilon();

  // Variables (u, delta). The decay row is normalized for conditioning; the
  // slack column and its penalty are rescaled so the relaxed problem stays
  // exactly min ... + rho delta^2 s.t. row <= rhs + delta.
  const Eigen::RowVectorXd row_u = lin.lg_v * lin.od.decoupling;
  const double row_rhs = -rate * lin.v - lin.lf_v - lin.lg_v.dot(lin.drift_err);
  const double row_norm = row_u.norm();
  const bool have_row = row_norm > 1e-12;

  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Zero(nu + 1, nu + 1);
  qp.hessian.topLeftCorner(nu, nu) = 2.0 * lin.od.decoupling.transpose() * lin.od.decoupling;
  qp.hessian(nu, nu) = 2.0 * rho * (have_row ? row_norm * row_norm : 1.0);
  qp.gradient = Eigen::VectorXd::Zero(nu + 1);
  qp.gradient.head(nu) = 2.0 * lin.od.decoupling.transpose() * lin.drift_err;

  if (have_row) {
    qp.ineq_matrix = Eigen::MatrixXd::Zero(1, nu + 1);
    qp.ineq_matrix.leftCols(nu) = row_u / row_norm;
    qp.ineq_matrix(0, nu) = -1.0;
    qp.ineq_lower = Eigen::VectorXd::Constant(1, -kInf);
    qp.ineq_upper = Eigen::VectorXd::Constant(1, row_rhs / row_norm);
  } else {
    qp.ineq_matrix.resize(0, nu + 1);
    qp.ineq_lower.resize(0);
    qp.ineq_upper.resize(0);
  }
  appendExtraRows(qp, options, nu, nu + 1);
  applyTorqueBox(qp, nu, options.torque_limit);

  QpSolver solver;
  const QpSolution sol = solver.solve(qp);

  TorqueResult result;
  result.status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status != QpStatus::kOptimal) return result;
  result.u = sol.x.head(nu);
  result.delta = have_row ? sol.x(nu) * row_norm : 0.0;
  result.objective = sol.objective + lin.drift_err.squaredNorm();
  const double vdot = lin.lf_v + lin.lg_v.dot(lin.od.decoupling * result.u + lin.drift_err);
  result.clf_margin = -(vdot + rate * lin.v);
  return result;
}

}  // namespace hzdclf
