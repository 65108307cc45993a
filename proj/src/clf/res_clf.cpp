#include "hzdclf/clf/res_clf.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"
#include "hzdclf/numeric/care.hpp"

namespace hzdclf {

namespace {

void requireSymmetric(const Eigen::MatrixXd& m, const char* label) {
  if (m.rows() != m.cols() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgumentError(std::string(label) + " must be symmetric");
  }
}

}  // namespace

ResClf ResClf::build(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R, double epsilon) {
  requireSymmetric(Q, "Q");
  requireSymmetric(R, "R");
  if (Q.rows() % 2 != 0 || Q.rows() / 2 != R.rows()) {
    throw InvalidArgumentError("Q must be 2m x 2m and R m x m");
  }
  if (!(epsilon > 0.0) || epsilon > 1.0) throw InvalidArgumentError("epsilon must be in (0, 1]");

  const int m = static_cast<int>(R.rows());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  F.topRightCorner(m, m).setIdentity();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * m, m);
  G.bottomRows(m).setIdentity();

  ResClf clf;
  clf.m_ = m;
  clf.epsilon_ = epsilon;
  clf.q_ = Q;
  clf.r_ = R;
  clf.p_ = solveCare(F, G, Q, R);

  Eigen::MatrixXd i_eps = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  i_eps.topLeftCorner(m, m) /= epsilon;
  clf.p_eps_ = i_eps * clf.p_ * i_eps;
  // Guard exact symmetry against roundoff; eigensolvers and the quadratic
  // form both assume it.
  clf.p_eps_ = 0.5 * (clf.p_eps_ + clf.p_eps_.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_q(Q);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_p(clf.p_);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_pe(clf.p_eps_);
  const double q_min = eig_q.eigenvalues().minCoeff();
  clf.gamma_ = q_min / eig_pe.eigenvalues().maxCoeff();
  clf.gamma_unscaled_ = q_min / eig_p.eigenvalues().maxCoeff();
  clf.c1_ = eig_pe.eigenvalues().minCoeff();
  clf.c2_ = epsilon * epsilon * eig_pe.eigenvalues().maxCoeff();
  if (!(clf.gamma_ > 0.0)) throw SolverError("CLF rate is not positive; Q must be PD");
  return clf;
}

ResClf ResClf::buildDiagonal(const Eigen::VectorXd& q_position, const Eigen::VectorXd& q_velocity,
                             const Eigen::VectorXd& r, double epsilon) {
  const auto m = q_position.size();
  if (q_velocity.size() != m || r.size() != m) {
    throw InvalidArgumentError("diagonal CLF weights must share one length");
  }
  Eigen::VectorXd q_diag(2 * m);
  q_diag << q_position, q_velocity;
  return build(q_diag.asDiagonal(), Eigen::MatrixXd(r.asDiagonal()), epsilon);
}

double ResClf::normBound(double t) const {
  return std::sqrt(c2_ / c1_) / epsilon_ * std::exp(-0.5 * gamma_ / epsilon_ * t);
}

double ResClf::value(const Eigen::VectorXd& eta) const {
  if (eta.size() != 2 * m_) throw InvalidArgumentError("eta dimension mismatch");
  return eta.dot(p_eps_ * eta);
}

double ResClf::lieDerivativeF(const Eigen::VectorXd& eta) const {
  if (eta.size() != 2 * m_) throw InvalidArgumentError("eta dimension mismatch");
  // F' P_eps + P_eps F applied without forming F: (F eta) = (eta_vel, 0).
  Eigen::VectorXd f_eta = Eigen::VectorXd::Zero(2 * m_);
  f_eta.head(m_) = eta.tail(m_);
  return 2.0 * eta.dot(p_eps_ * f_eta);
}

Eigen::RowVectorXd ResClf::lieDerivativeG(const Eigen::VectorXd& eta) const {
  if (eta.size() != 2 * m_) throw InvalidArgumentError("eta dimension mismatch");
  // 2 eta' P_eps G picks the velocity-block columns.
  return 2.0 * (p_eps_ * eta).tail(m_).transpose();
}

ClfRow clfConstraintRow(const ResClf& clf, const Eigen::VectorXd& eta, const Eigen::MatrixXd& j_y,
                        const Eigen::VectorXd& jdot_qdot, const Eigen::VectorXd& ydd_desired) {
  const Eigen::RowVectorXd lg_v = clf.lieDerivativeG(eta);
  ClfRow row;
  row.qdd_coeffs = lg_v * j_y;
  row.rhs = -clf.gamma() / clf.epsilon() * clf.value(eta) - clf.lieDerivativeF(eta) -
            lg_v * (jdot_qdot - ydd_desired);
  return row;
}

OutputDynamics outputDynamics(const RobotModel& model, const OutputSet& outputs,
                              const ConstraintSet& constraints, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd) {
  const int n = model.numPositions();
  const int nu = model.numActuators();
  const int mc = constraints.totalDim();

  const Eigen::MatrixXd d = model.massMatrix(q);
  const Eigen::VectorXd h = model.biasForces(q, qd);
  const Eigen::MatrixXd b = model.actuationMatrix();

  OutputDynamics out;
  if (mc == 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
    out.qdd_drift = lu.solve(-h);
    out.qdd_input = lu.solve(b);
  } else {
    const Eigen::MatrixXd jc = constraints.jacobian(q);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + mc, n + mc);
    kkt.topLeftCorner(n, n) = d;
    kkt.topRightCorner(n, mc) = -jc.transpose();
    kkt.bottomLeftCorner(mc, n) = jc;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);

    Eigen::VectorXd rhs0 = Eigen::VectorXd::Zero(n + mc);
    rhs0.head(n) = -h;
    rhs0.tail(mc) = -constraints.jdotQdot(q, qd);
    out.qdd_drift = lu.solve(rhs0).head(n);

    Eigen::MatrixXd rhs_u = Eigen::MatrixXd::Zero(n + mc, nu);
    rhs_u.topRows(n) = b;
    out.qdd_input = lu.solve(rhs_u).topRows(n);
  }
  if (!out.qdd_drift.allFinite() || !out.qdd_input.allFinite()) {
    throw SolverError("constrained output dynamics produced non-finite values");
  }

  const Eigen::MatrixXd j_y = outputs.jacobian(q);
  out.drift = j_y * out.qdd_drift + outputs.jdotQdot(q, qd);
  out.decoupling = j_y * out.qdd_input;
  return out;
}

double kappaMembership(const ResClf& clf, const RobotModel& model, const OutputSet& outputs,
                       const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& qd, const Eigen::VectorXd& u) {
  const OutputState state = outputError(outputs, t, q, qd);
  const Eigen::VectorXd eta = state.eta();
  const PhasePoint p = outputs.phase(t);

  const OutputDynamics dyn = outputDynamics(model, outputs, constraints, q, qd);
  // The output error inherits the reference acceleration: ydd_error =
  // drift + decoupling u - ydd_desired.
  const Eigen::VectorXd nu = dyn.drift + dyn.decoupling * u - outputs.desiredAccel(p);
  const double vdot = clf.lieDerivativeF(eta) + clf.lieDerivativeG(eta) * nu;
  return -(vdot + clf.gamma() / clf.epsilon() * clf.value(eta));
}

nlohmann::json clfToJson(const ResClf& clf) {
  nlohmann::json j;
  j["epsilon"] = clf.epsilon();
  j["Q"] = matrixToJson(clf.Q());
  j["R"] = matrixToJson(clf.R());
  return j;
}

ResClf clfFromJson(const nlohmann::json& j, const std::string& where) {
  requireKeysIn(j, {"epsilon", "Q", "R"}, where);
  const double epsilon = numberAt(j, "epsilon", where);
  const Eigen::MatrixXd q = matrixFromJson(requireKey(j, "Q", where), where + ".Q");
  const Eigen::MatrixXd r = matrixFromJson(requireKey(j, "R", where), where + ".R");
  try {
    return ResClf::build(q, r, epsilon);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace hzdclf
