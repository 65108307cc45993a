#pragma once

#include <Eigen/Dense>

#include "hzdclf/dynamics/constraint.hpp"

namespace hzdclf {

// Number of wrench components carried by a contact of the given layout.
int wrenchDimension(WrenchLayout layout);

struct ContactLimits {
  double friction_mu = 0.6;
  // Half the foot length, used by line contacts to bound the sagittal and
  // yaw moments. Ignored for point contacts.
  double foot_half_length = 0.0;
};

// Linearized admissibility of a contact wrench as rows A with A*lambda >= 0:
// nonnegative normal force, a friction pyramid inscribed in the cone
// (|f_t| <= mu/sqrt(2) * fz per tangential axis), and for line contacts
// moment bounds |m| <= foot_half_length * fz. The rows are reused verbatim as
// controller inequality constraints.
Eigen::MatrixXd admissibilityRows(WrenchLayout layout, const ContactLimits& limits);

struct AdmissibilityReport {
  Eigen::VectorXd margins;  // one per pyramid row, >= 0 when satisfied
  double worst = 0.0;       // min margin
  // Exact cone slack mu*fz - |f_tangential|. Negative while the pyramid rows
  // still hold means the wrench sits between pyramid and cone; diagnostic only.
  double cone_margin = 0.0;
  bool admissible = false;
};

AdmissibilityReport contactAdmissibility(const Eigen::VectorXd& wrench, WrenchLayout layout,
                                         const ContactLimits& limits);

}  // namespace hzdclf
