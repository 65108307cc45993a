#pragma once

#include "hzdclf/models/planar_chain.hpp"

namespace hzdclf {

// Planar five-link biped with series compliance at mid-shin. Seven rigid
// bodies (torso, two thighs, each shin split at the spring pivot), point
// feet, hips and knees actuated, springs passive. Nine coordinates:
//   0 x, 1 z, 2 torso pitch,
//   3 left hip, 4 left knee, 5 left shin spring,
//   6 right hip, 7 right knee, 8 right shin spring.
// Links point along (0, -length) in their own frame; positive knee rotation
// swings the foot forward.
struct Cb5Parameters {
  double torso_mass = 10.0;
  double torso_com_offset = 0.25;  // above the hip
  double torso_inertia = 10.0 * 0.5 * 0.5 / 12.0;
  double thigh_mass = 1.0;
  double thigh_length = 0.4;
  double thigh_inertia = 1.0 * 0.4 * 0.4 / 12.0;
  double shin_length = 0.4;  // total; the spring pivot splits it in half
  double shin_half_mass = 0.5;
  double shin_half_inertia = 0.5 * 0.2 * 0.2 / 12.0;
  double rotor_inertia = 0.12;  // reflected, hips and knees
  double spring_stiffness = 600.0;
  double spring_damping = 2.0;
  double gravity = 9.81;
  double friction_mu = 0.6;
  double torque_limit = 80.0;
};

enum class Side { kLeft, kRight };
Side otherSide(Side side);
const char* sideName(Side side);

class Cb5Model : public PlanarChain {
 public:
  static constexpr int kBaseX = 0;
  static constexpr int kBaseZ = 1;
  static constexpr int kTorsoPitch = 2;
  static constexpr int kLeftHip = 3;
  static constexpr int kLeftKnee = 4;
  static constexpr int kLeftSpring = 5;
  static constexpr int kRightHip = 6;
  static constexpr int kRightKnee = 7;
  static constexpr int kRightSpring = 8;

  explicit Cb5Model(const Cb5Parameters& params = Cb5Parameters());

  const Cb5Parameters& parameters() const { return params_; }

  static int hipCoord(Side side) { return side == Side::kLeft ? kLeftHip : kRightHip; }
  static int kneeCoord(Side side) { return side == Side::kLeft ? kLeftKnee : kRightKnee; }
  static int springCoord(Side side) { return side == Side::kLeft ? kLeftSpring : kRightSpring; }
  static const char* footMarker(Side side) {
    return side == Side::kLeft ? "foot_left" : "foot_right";
  }

  // Hip-to-foot distance with the shin spring at rest, as a function of the
  // knee angle alone, plus derivatives used by output Jacobians.
  double legLength(double q_knee) const;
  double legLengthDerivative(double q_knee) const;
  double legLengthSecondDerivative(double q_knee) const;

  // Angle from the thigh axis to the hip-to-foot line (spring at rest).
  // Absolute leg pitch = torso pitch + hip angle + this offset.
  double legPitchOffset(double q_knee) const;
  double legPitchOffsetDerivative(double q_knee) const;
  double legPitchOffsetSecondDerivative(double q_knee) const;

  // Both legs at the given knee bend, leg lines vertical, feet at z = 0.
  Eigen::VectorXd symmetricPose(double knee_angle) const;

  // Impact relabel: spring deflections restart at zero each step.
  Eigen::VectorXd resetPositions(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd resetVelocityMap(const Eigen::VectorXd& q) const override;

  // Ground contacts anchored at the origin, the two spring locks, and an
  // inter-foot closure at the nominal step length.
  std::vector<HolonomicConstraint> constraintCatalog() const override;

 private:
  Cb5Parameters params_;
};

}  // namespace hzdclf
