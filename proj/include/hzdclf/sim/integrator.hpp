#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hzdclf {

using OdeRhs = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;

// Classic fixed-step fourth-order Runge-Kutta update. Throws SolverError if
// the state leaves the finite range.
Eigen::VectorXd rk4Step(const OdeRhs& f, double t, const Eigen::VectorXd& x, double dt);

}  // namespace hzdclf
