#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "hzdclf/dynamics/constraint.hpp"
#include "hzdclf/dynamics/robot_model.hpp"
#include "hzdclf/outputs/output_set.hpp"

namespace hzdclf {

// Rapidly exponentially stabilizing control Lyapunov function for the
// double-integrator output error dynamics eta_dot = F eta + G nu with
// F = [0 I; 0 0], G = [0; I]:
//
//   V(eta) = eta' P_eps eta,  P_eps = I_eps P I_eps,  I_eps = diag(I/eps, I)
//
// where P solves the Riccati equation for (F, G, Q, R). The convergence
// rate enforced by the controllers is gamma/eps with
// gamma = lambda_min(Q)/lambda_max(P_eps); the eps-free variant
// lambda_min(Q)/lambda_max(P), whose scaled rate grows without bound as
// eps shrinks, is kept alongside for analysis.
class ResClf {
 public:
  // Q is 2m x 2m PSD, R is m x m PD, eps in (0, 1].
  static ResClf build(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R, double epsilon);
  // Diagonal convenience: Q = diag(q_position, q_velocity), R = diag(r).
  static ResClf buildDiagonal(const Eigen::VectorXd& q_position,
                              const Eigen::VectorXd& q_velocity, const Eigen::VectorXd& r,
                              double epsilon);

  int numOutputs() const { return m_; }
  double epsilon() const { return epsilon_; }
  const Eigen::MatrixXd& P() const { return p_; }
  const Eigen::MatrixXd& Peps() const { return p_eps_; }
  const Eigen::MatrixXd& Q() const { return q_; }
  const Eigen::MatrixXd& R() const { return r_; }

  // lambda_min(Q)/lambda_max(P_eps); the rate used in the QP rows is
  // gamma()/epsilon().
  double gamma() const { return gamma_; }
  // lambda_min(Q)/lambda_max(P); divided by eps this is the rate that grows
  // as eps -> 0.
  double gammaUnscaled() const { return gamma_unscaled_; }

  // Sandwich constants: c1 ||eta||^2 <= V <= (c2/eps^2) ||eta||^2.
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  // Multiplier m(t) with ||eta(t)|| <= m(t) ||eta(0)|| along any trajectory
  // satisfying the V-decay bound: sqrt(lambda_max(P_eps)/lambda_min(P_eps))
  // times exp(-gamma t / (2 eps)).
  double normBound(double t) const;

  double value(const Eigen::VectorXd& eta) const;

  // (L_F V, L_G V) with Vdot = L_F V + L_G V * nu.
  double lieDerivativeF(const Eigen::VectorXd& eta) const;
  Eigen::RowVectorXd lieDerivativeG(const Eigen::VectorXd& eta) const;

 private:
  ResClf() = default;

  int m_ = 0;
  double epsilon_ = 1.0;
  Eigen::MatrixXd q_, r_, p_, p_eps_;
  double gamma_ = 0.0;
  double gamma_unscaled_ = 0.0;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

// One inequality over the stacked decision vector (qdd, u, lambda):
// qdd_coeffs * qdd <= rhs encodes
//   L_F V + L_G V (J_y qdd + Jdot_y qd - ydd_desired) <= -(gamma/eps) V,
// the decay condition on the true output error (the reference acceleration
// belongs to the error dynamics; dropping it would enforce a rate the real
// V(t) does not follow). Only the acceleration block is populated;
// relaxation columns are the QP assembler's business.
struct ClfRow {
  Eigen::RowVectorXd qdd_coeffs;
  double rhs = 0.0;
};
ClfRow clfConstraintRow(const ResClf& clf, const Eigen::VectorXd& eta, const Eigen::MatrixXd& j_y,
                        const Eigen::VectorXd& jdot_qdot, const Eigen::VectorXd& ydd_desired);

// Input-output linearization of the constrained dynamics:
// ydd = drift + decoupling * u, obtained from one KKT factorization.
struct OutputDynamics {
  Eigen::VectorXd drift;       // L_f y (second Lie derivative drift)
  Eigen::MatrixXd decoupling;  // A(x) = J_y * (du -> qdd map)
  Eigen::VectorXd qdd_drift;   // qdd at u = 0
  Eigen::MatrixXd qdd_input;   // d(qdd)/du
};
OutputDynamics outputDynamics(const RobotModel& model, const OutputSet& outputs,
                              const ConstraintSet& constraints, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd);

// Signed margin of u against the admissible set K_eps(x):
// margin = -(L_f V + L_g V u + (gamma/eps) V); nonnegative iff u qualifies.
double kappaMembership(const ResClf& clf, const RobotModel& model, const OutputSet& outputs,
                       const ConstraintSet& constraints, double t, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& qd, const Eigen::VectorXd& u);

// (P, eps, Q, R) round-trip for controller config files.
nlohmann::json clfToJson(const ResClf& clf);
ResClf clfFromJson(const nlohmann::json& j, const std::string& where);

}  // namespace hzdclf
