#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hzdclf/dynamics/robot_model.hpp"

namespace hzdclf::cassie {

// Coordinate bookkeeping and closed-form leg kinematics for the Cassie
// biped. Coordinates: 6 floating-base followed by 8 per leg in the order
// (hip roll, hip yaw, hip pitch, knee, shin spring, tarsus, heel spring,
// toe pitch), left leg first.
struct Constants {
  int num_positions = 22;
  int base_dim = 6;
  int leg_dim = 8;

  int left_shin_spring = 10;
  int left_heel_spring = 12;
  int right_shin_spring = 18;
  int right_heel_spring = 20;

  double shin_spring_stiffness = 2300.0;
  double shin_spring_damping = 4.4;
  double heel_spring_stiffness = 2000.0;
  double heel_spring_damping = 4.0;

  // Achilles-rod closure length in meters.
  double achilles_length = 0.5012;

  // Reflected inertias of the five actuated joints of one leg
  // (hip roll, hip yaw, hip pitch, knee, toe).
  std::vector<double> reflected_inertia_leg = {1.435046, 1.435046, 1.435046, 1.44662, 1.44662};

  // Spring/damper catalog in the 22-coordinate indexing.
  std::vector<SpringEntry> springCatalog() const;
};

const Constants& constants();

// Hip-to-toe distance of the spring-neutral leg as a function of the knee
// angle. Throws SolverError when the knee angle folds the leg past the
// expression's domain.
double legLength(double q_knee);

// Residual of the multi-bar closure linking knee and tarsus with both
// springs at rest; zero defines the neutral tarsus angle.
double tarsusClosureResidual(double q_knee, double q_tarsus);

// Neutral tarsus angle: the root of the closure residual in (0, pi). Where a
// second root appears near the leg fold, the larger one is returned; that is
// the branch that stays continuous across the physical knee range. Throws
// SolverError when the bracket holds no sign change.
double neutralTarsus(double q_knee);

// Rigid-model shortcut for the same relation, 13 degrees minus the knee
// angle. Kept for reporting how far the closure root drifts from it.
double rigidTarsusApprox(double q_knee);

// Signed violation of the achilles-rod closure given the current hip-to-heel
// distance.
double achillesResidual(double distance);

// Post-impact leg relabel for one leg (8 coordinates in the leg ordering):
// springs zeroed and the tarsus moved to its neutral angle.
Eigen::VectorXd legReset(const Eigen::VectorXd& q_leg);

}  // namespace hzdclf::cassie
