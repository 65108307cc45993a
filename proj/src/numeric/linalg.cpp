#include "hzdclf/numeric/linalg.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf {

Eigen::MatrixXd pseudoInverse(const Eigen::MatrixXd& A, double tol) {
  if (A.size() == 0) return A.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (tol <= 0.0)
    tol = std::max(A.rows(), A.cols()) * Eigen::NumTraits<double>::epsilon();
  const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd numericJacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x, double step) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd J;
  Eigen::VectorXd xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    const double h = step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    const Eigen::VectorXd fp = f(xp);
    const Eigen::VectorXd fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw SolverError("numericJacobian: non-finite function evaluation");
    if (J.size() == 0) J.resize(fp.size(), n);
    J.col(i) = (fp - fm) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return J;
}

}  // namespace hzdclf
