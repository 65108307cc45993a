#include "hzdclf/dynamics/robot_model.hpp"

namespace hzdclf {

Eigen::VectorXd RobotModel::springForces(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(numVelocities());
  for (const auto& s : springs()) {
    kappa(s.coord) = -(s.stiffness * q(s.coord) + s.damping * qd(s.coord));
  }
  return kappa;
}

Eigen::VectorXd RobotModel::biasForces(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  return coriolisMatrix(q, qd) * qd + gravityForces(q) - springForces(q, qd);
}

double RobotModel::kineticEnergy(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  return 0.5 * qd.dot(massMatrix(q) * qd);
}

double RobotModel::totalEnergy(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  return kineticEnergy(q, qd) + potentialEnergy(q);
}

Eigen::MatrixXd RobotModel::resetVelocityMap(const Eigen::VectorXd& q) const {
  (void)q;
  return Eigen::MatrixXd::Identity(numVelocities(), numVelocities());
}

}  // namespace hzdclf
