#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hzdclf/dynamics/constraint.hpp"

namespace hzdclf {

// Passive spring/damper acting on one coordinate.
struct SpringEntry {
  int coord = 0;
  double stiffness = 0.0;  // N*m/rad or N/m
  double damping = 0.0;
};

// Rigid-body dynamics interface in the form
//   D(q) qddot + C(q,qd) qd + G(q) - kappa(q,qd) = B u + J_c' lambda
// where kappa collects joint spring/damper forces with the restoring sign,
// kappa_i = -(k_i q_i + b_i qd_i). biasForces() packs the left-hand side terms
// that do not multiply qddot.
class RobotModel {
 public:
  virtual ~RobotModel() = default;

  virtual int numPositions() const = 0;
  virtual int numVelocities() const { return numPositions(); }
  virtual int numActuators() const = 0;

  virtual Eigen::MatrixXd massMatrix(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::MatrixXd coriolisMatrix(const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& qd) const = 0;
  virtual Eigen::VectorXd gravityForces(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::MatrixXd actuationMatrix() const = 0;

  virtual std::vector<SpringEntry> springs() const { return {}; }

  // kappa(q, qd); the default evaluates the spring catalog.
  virtual Eigen::VectorXd springForces(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  // H(q, qd) = C qd + G - kappa.
  Eigen::VectorXd biasForces(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  virtual double kineticEnergy(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;
  // Gravity plus spring storage.
  virtual double potentialEnergy(const Eigen::VectorXd& q) const = 0;
  double totalEnergy(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  // Discrete position relabel/reset applied at impact, and its velocity-level
  // linearization d(resetPositions)/dq. The defaults are the identity.
  virtual Eigen::VectorXd resetPositions(const Eigen::VectorXd& q) const { return q; }
  virtual Eigen::MatrixXd resetVelocityMap(const Eigen::VectorXd& q) const;

  // Named constraints this model can activate, with neutral references.
  // Callers needing a specific anchor or target build their own instances
  // through the model's factories.
  virtual std::vector<HolonomicConstraint> constraintCatalog() const { return {}; }
};

}  // namespace hzdclf
