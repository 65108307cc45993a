#include "hzdclf/sim/integrator.hpp"

#include "hzdclf/errors.hpp"

namespace hzdclf {

Eigen::VectorXd rk4Step(const OdeRhs& f, double t, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
  const Eigen::VectorXd k4 = f(t + dt, x + dt * k3);
  Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw SolverError("rk4Step produced a non-finite state");
  return next;
}

}  // namespace hzdclf
