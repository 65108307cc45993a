#include "hzdclf/numeric/care.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "hzdclf/errors.hpp"

namespace hzdclf {
namespace {

bool isDiagonal(const Eigen::MatrixXd& M, double tol) {
  return (M - Eigen::MatrixXd(M.diagonal().asDiagonal())).lpNorm<Eigen::Infinity>() <= tol;
}

// Detects the double-integrator structure F = [0 I; 0 0], G = [0; I].
bool hasBlockStructure(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                       const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const int n = static_cast<int>(F.rows());
  if (n % 2 != 0) return false;
  const int m = n / 2;
  if (G.rows() != n || G.cols() != m) return false;
  Eigen::MatrixXd Fref = Eigen::MatrixXd::Zero(n, n);
  Fref.topRightCorner(m, m).setIdentity();
  Eigen::MatrixXd Gref = Eigen::MatrixXd::Zero(n, m);
  Gref.bottomRows(m).setIdentity();
  return (F - Fref).lpNorm<Eigen::Infinity>() == 0.0 &&
         (G - Gref).lpNorm<Eigen::Infinity>() == 0.0 && isDiagonal(Q, 0.0) &&
         isDiagonal(R, 0.0);
}

}  // namespace

Eigen::MatrixXd careBlockSolution(const Eigen::VectorXd& q_upper,
                                  const Eigen::VectorXd& q_lower,
                                  const Eigen::VectorXd& r) {
  const int m = static_cast<int>(q_upper.size());
  if (q_lower.size() != m || r.size() != m)
    throw InvalidArgumentError("careBlockSolution: size mismatch");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    if (!(q_upper(i) > 0.0) || q_lower(i) < 0.0 || !(r(i) > 0.0))
      throw InvalidArgumentError("careBlockSolution: weights must be positive");
    const double p_od = std::sqrt(r(i) * q_upper(i));
    const double p_ld = std::sqrt(r(i) * (q_lower(i) + 2.0 * p_od));
    const double p_ud = p_od * p_ld / r(i);
    P(i, i) = p_ud;
    P(i, m + i) = p_od;
    P(m + i, i) = p_od;
    P(m + i, m + i) = p_ld;
  }
  return P;
}

double careResidual(const Eigen::MatrixXd& P, const Eigen::MatrixXd& F,
                    const Eigen::MatrixXd& G, const Eigen::MatrixXd& Q,
                    const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd S = G * R.ldlt().solve(G.transpose());
  return (F.transpose() * P + P * F - P * S * P + Q).lpNorm<Eigen::Infinity>();
}

Eigen::MatrixXd solveLyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  // vec(A'X + XA) = (I (x) A' + A' (x) I) vec(X)
  for (int i = 0; i < n; ++i) {
    K.block(i * n, i * n, n, n) += A.transpose();
    for (int j = 0; j < n; ++j) K.block(i * n, j * n, n, n) += A(j, i) * I;
  }
  Eigen::VectorXd w(n * n);
  for (int i = 0; i < n; ++i) w.segment(i * n, n) = W.col(i);
  const Eigen::VectorXd xv = K.partialPivLu().solve(w);
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i) X.col(i) = xv.segment(i * n, n);
  return 0.5 * (X + X.transpose());
}

Eigen::MatrixXd solveCare(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const int n = static_cast<int>(F.rows());
  if (F.cols() != n) throw InvalidArgumentError("solveCare: F must be square");
  if (G.rows() != n) throw InvalidArgumentError("solveCare: G row mismatch");
  const int m = static_cast<int>(G.cols());
  if (Q.rows() != n || Q.cols() != n) throw InvalidArgumentError("solveCare: Q size");
  if (R.rows() != m || R.cols() != m) throw InvalidArgumentError("solveCare: R size");
  if ((Q - Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + Q.lpNorm<Eigen::Infinity>()))
    throw InvalidArgumentError("solveCare: Q must be symmetric");
  if ((R - R.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + R.lpNorm<Eigen::Infinity>()))
    throw InvalidArgumentError("solveCare: R must be symmetric");
  if (R.llt().info() != Eigen::Success)
    throw InvalidArgumentError("solveCare: R must be positive definite");

  const double qscale = 1.0 + Q.lpNorm<Eigen::Infinity>();

  if (hasBlockStructure(F, G, Q, R)) {
    const int half = n / 2;
    Eigen::MatrixXd P = careBlockSolution(Q.diagonal().head(half),
                                          Q.diagonal().tail(half), R.diagonal());
    const double res = careResidual(P, F, G, Q, R);
    if (res > 1e-8 * qscale)
      throw SolverError("solveCare: block solution residual " + std::to_string(res));
    return P;
  }

  const Eigen::MatrixXd S = G * R.ldlt().solve(G.transpose());
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << F, -S, -Q, -F.transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw SolverError("solveCare: eigensolver failed");

  // Stack the eigenvectors of the n stable eigenvalues.
  std::vector<int> order(2 * n);
  for (int i = 0; i < 2 * n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
  });
  Eigen::MatrixXcd U(2 * n, n);
  int stable = 0;
  for (int i = 0; i < n; ++i) {
    U.col(i) = es.eigenvectors().col(order[i]);
    if (es.eigenvalues()(order[i]).real() < 0) ++stable;
  }
  if (stable < n)
    throw SolverError("solveCare: Hamiltonian has fewer than n stable eigenvalues "
                      "(system not stabilizable/detectable)");

  const Eigen::MatrixXcd U1 = U.topRows(n);
  const Eigen::MatrixXcd U2 = U.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(U1);
  if (!lu.isInvertible())
    throw SolverError("solveCare: stable subspace is not a graph over the state space");
  Eigen::MatrixXd P = (U2 * lu.inverse()).real();
  P = 0.5 * (P + P.transpose());

  // Newton (Kleinman) polish: quadratic convergence from a stabilizing start.
  double res = careResidual(P, F, G, Q, R);
  for (int it = 0; it < 8 && res > 1e-12 * qscale; ++it) {
    const Eigen::MatrixXd Acl = F - S * P;
    const Eigen::MatrixXd Pn = solveLyapunov(Acl, -(Q + P * S * P));
    const double rn = careResidual(Pn, F, G, Q, R);
    if (!std::isfinite(rn) || rn >= res) break;
    P = Pn;
    res = rn;
  }

  if (res > 1e-8 * qscale)
    throw SolverError("solveCare: residual " + std::to_string(res) + " exceeds tolerance");
  if (P.llt().info() != Eigen::Success) {
    // PSD (not PD) solutions arise for semidefinite Q; accept only if the
    // closed loop is stable and the residual is tight.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(P);
    if (sa.eigenvalues().minCoeff() < -1e-10 * qscale)
      throw SolverError("solveCare: solution is not positive semidefinite");
  }
  const Eigen::MatrixXd Acl = F - S * P;
  if (Eigen::EigenSolver<Eigen::MatrixXd>(Acl).eigenvalues().real().maxCoeff() >= 1e-10)
    throw SolverError("solveCare: closed loop is not Hurwitz");
  return P;
}

}  // namespace hzdclf
