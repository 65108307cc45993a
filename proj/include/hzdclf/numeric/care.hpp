#pragma once

#include <Eigen/Dense>

namespace hzdclf {

// Solves the continuous algebraic Riccati equation
//
//   F' P + P F - P G R^{-1} G' P + Q = 0
//
// for the stabilizing solution P = P' > 0. Q must be symmetric PSD, R
// symmetric PD, and (F, G) stabilizable. The stable invariant subspace of the
// Hamiltonian matrix provides the initial solution, which is then polished by
// a couple of Newton (Kleinman) steps. Throws SolverError when no stabilizing
// solution is found or the residual check fails.
//
// When F = [0 I; 0 0], G = [0; I] and Q, R are diagonal, the closed-form
// block solution is used directly (and is also exposed below for tests).
Eigen::MatrixXd solveCare(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Closed-form CARE solution for the double-integrator block structure:
// F = [0 I; 0 0], G = [0; I], Q = diag(q_upper, q_lower), R = diag(r),
// all of size m. Writing P = [P_ud P_od; P_od' P_ld] with diagonal blocks,
//
//   P_od,i = sqrt(r_i q_upper,i)
//   P_ld,i = sqrt(r_i (q_lower,i + 2 P_od,i))
//   P_ud,i = P_od,i P_ld,i / r_i
//
// Inputs must be positive (q_lower may be zero).
Eigen::MatrixXd careBlockSolution(const Eigen::VectorXd& q_upper,
                                  const Eigen::VectorXd& q_lower,
                                  const Eigen::VectorXd& r);

// Residual ||F'P + PF - P G R^{-1} G' P + Q||_inf, for verification.
double careResidual(const Eigen::MatrixXd& P, const Eigen::MatrixXd& F,
                    const Eigen::MatrixXd& G, const Eigen::MatrixXd& Q,
                    const Eigen::MatrixXd& R);

// Solves the Lyapunov equation A' X + X A = W (W symmetric) by
// vectorization; intended for the small systems used here (n <= ~20).
Eigen::MatrixXd solveLyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W);

}  // namespace hzdclf
