#include "hzdclf/dynamics/dynamics.hpp"

#include <Eigen/SVD>

#include "hzdclf/errors.hpp"
#include "hzdclf/numeric/linalg.hpp"

namespace hzdclf {

namespace {

constexpr double kRankTol = 1e-8;

void requireFullRowRank(const Eigen::MatrixXd& j, const ConstraintSet& constraints) {
  if (j.rows() == 0) return;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (j.rows() > j.cols() || smax <= 0.0 || sv(sv.size() - 1) < kRankTol * smax) {
    throw DegenerateConstraintError(
        constraints.names(),
        "constraint jacobian lost row rank (active set: " + constraints.names() + ")");
  }
}

void checkStateSizes(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  if (q.size() != model.numPositions() || qd.size() != model.numVelocities()) {
    throw InvalidArgumentError("state size does not match model");
  }
}

}  // namespace

ConstrainedDynamics constrainedForwardDynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                               const Eigen::VectorXd& qd, const Eigen::VectorXd& u,
                                               const ConstraintSet& constraints,
                                               const std::optional<BaumgarteParams>& stabilization) {
  checkStateSizes(model, q, qd);
  if (u.size() != model.numActuators()) throw InvalidArgumentError("input size does not match model");

  const int n = model.numVelocities();
  const Eigen::MatrixXd d = model.massMatrix(q);
  const Eigen::VectorXd rhs_free = model.actuationMatrix() * u - model.biasForces(q, qd);

  ConstrainedDynamics out;
  if (constraints.empty()) {
    out.qdd = d.ldlt().solve(rhs_free);
    out.lambda = Eigen::VectorXd(0);
    return out;
  }

  const int m = constraints.totalDim();
  const Eigen::MatrixXd j = constraints.jacobian(q);
  requireFullRowRank(j, constraints);

  Eigen::VectorXd accel_rhs = -constraints.jdotQdot(q, qd);
  if (stabilization) {
    const double sigma = stabilization->sigma;
    accel_rhs -= 2.0 * sigma * (j * qd) + sigma * sigma * constraints.value(q);
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = d;
  kkt.topRightCorner(n, m) = -j.transpose();
  kkt.bottomLeftCorner(m, n) = j;
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = rhs_free;
  rhs.tail(m) = accel_rhs;

  const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
  if (!sol.allFinite()) throw SolverError("constrained dynamics produced non-finite values");
  out.qdd = sol.head(n);
  out.lambda = sol.tail(m);
  return out;
}

Eigen::VectorXd constraintForces(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd, const Eigen::VectorXd& u,
                                 const ConstraintSet& constraints) {
  checkStateSizes(model, q, qd);
  if (constraints.empty()) return Eigen::VectorXd(0);

  const Eigen::MatrixXd j = constraints.jacobian(q);
  requireFullRowRank(j, constraints);

  const auto d_ldlt = model.massMatrix(q).ldlt();
  const Eigen::VectorXd h = model.biasForces(q, qd);
  const Eigen::MatrixXd dinv_jt = d_ldlt.solve(j.transpose());
  const Eigen::MatrixXd a = j * dinv_jt;
  const Eigen::VectorXd rhs =
      dinv_jt.transpose() * (h - model.actuationMatrix() * u) - constraints.jdotQdot(q, qd);
  return a.ldlt().solve(rhs);
}

ImpactResult impactMap(const RobotModel& model, const Eigen::VectorXd& q_minus,
                       const Eigen::VectorXd& qd_minus, const ConstraintSet& post_constraints) {
  checkStateSizes(model, q_minus, qd_minus);

  Eigen::VectorXd qd_mid = qd_minus;
  Eigen::VectorXd impulse(0);
  if (!post_constraints.empty()) {
    const Eigen::MatrixXd j = post_constraints.jacobian(q_minus);
    requireFullRowRank(j, post_constraints);
    const auto d_ldlt = model.massMatrix(q_minus).ldlt();
    const Eigen::MatrixXd dinv_jt = d_ldlt.solve(j.transpose());
    const Eigen::MatrixXd a = j * dinv_jt;
    // Plastic: the post-impact velocity is the D-orthogonal projection of the
    // pre-impact velocity onto the constraint null space.
    impulse = -a.ldlt().solve(j * qd_minus);
    qd_mid += dinv_jt * impulse;
  }

  ImpactResult out;
  out.q_plus = model.resetPositions(q_minus);
  out.qd_plus = model.resetVelocityMap(q_minus) * qd_mid;
  out.impulse = impulse;
  return out;
}

ProjectedDynamics projectDynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qd, const ConstraintSet& hard,
                                  const ConstraintSet& soft) {
  checkStateSizes(model, q, qd);
  const int n = model.numVelocities();
  if (hard.empty()) {
    throw InvalidArgumentError("projectDynamics needs a nonempty hard constraint set");
  }

  const Eigen::MatrixXd jc = hard.jacobian(q);
  requireFullRowRank(jc, hard);
  const Eigen::MatrixXd jc_pinv = pseudoInverse(jc);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - jc_pinv * jc;

  const Eigen::MatrixXd d = model.massMatrix(q);
  const Eigen::MatrixXd pd = p * d;

  ProjectedDynamics out;
  out.projector = p;
  out.mass = d + pd - pd.transpose();  // p is symmetric, so pd' = d p
  out.bias = p * model.biasForces(q, qd) + d * (jc_pinv * hard.jdotQdot(q, qd));
  out.actuation = p * model.actuationMatrix();
  if (soft.empty()) {
    out.soft_jacobian_t = Eigen::MatrixXd(n, 0);
  } else {
    out.soft_jacobian_t = p * soft.jacobian(q).transpose();
  }
  return out;
}

}  // namespace hzdclf
