#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hzdclf {

// Moore-Penrose pseudoinverse via SVD. Singular values below
// tol * sigma_max are treated as zero (tol defaults to a size-scaled
// machine-precision threshold when <= 0).
Eigen::MatrixXd pseudoInverse(const Eigen::MatrixXd& A, double tol = -1.0);

// Central-difference Jacobian of f at x. Throws SolverError if any
// evaluation returns non-finite values.
Eigen::MatrixXd numericJacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x, double step = 1e-6);

}  // namespace hzdclf
