#include "hzdclf/models/cb5.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf {

namespace {

PlanarChainConfig makeConfig(const Cb5Parameters& p) {
  PlanarChainConfig cfg;
  cfg.floating_base = true;
  cfg.gravity = p.gravity;

  const double half_shin = 0.5 * p.shin_length;
  cfg.links = {
      {"torso", -1, {0, 0}, p.torso_mass, {0, p.torso_com_offset}, p.torso_inertia},
      {"thigh_left", 0, {0, 0}, p.thigh_mass, {0, -0.5 * p.thigh_length}, p.thigh_inertia},
      {"shin_upper_left", 1, {0, -p.thigh_length}, p.shin_half_mass, {0, -0.5 * half_shin},
       p.shin_half_inertia},
      {"shin_lower_left", 2, {0, -half_shin}, p.shin_half_mass, {0, -0.5 * half_shin},
       p.shin_half_inertia},
      {"thigh_right", 0, {0, 0}, p.thigh_mass, {0, -0.5 * p.thigh_length}, p.thigh_inertia},
      {"shin_upper_right", 4, {0, -p.thigh_length}, p.shin_half_mass, {0, -0.5 * half_shin},
       p.shin_half_inertia},
      {"shin_lower_right", 5, {0, -half_shin}, p.shin_half_mass, {0, -0.5 * half_shin},
       p.shin_half_inertia},
  };
  cfg.markers = {
      {"hip", 0, {0, 0}},
      {"knee_left", 1, {0, -p.thigh_length}},
      {"foot_left", 3, {0, -half_shin}},
      {"knee_right", 4, {0, -p.thigh_length}},
      {"foot_right", 6, {0, -half_shin}},
  };
  cfg.springs = {
      {Cb5Model::kLeftSpring, p.spring_stiffness, p.spring_damping},
      {Cb5Model::kRightSpring, p.spring_stiffness, p.spring_damping},
  };
  cfg.rotor_inertia = Eigen::VectorXd::Zero(9);
  for (int c : {Cb5Model::kLeftHip, Cb5Model::kLeftKnee, Cb5Model::kRightHip, Cb5Model::kRightKnee}) {
    cfg.rotor_inertia(c) = p.rotor_inertia;
  }
  cfg.actuated_coords = {Cb5Model::kLeftHip, Cb5Model::kLeftKnee, Cb5Model::kRightHip,
                         Cb5Model::kRightKnee};
  return cfg;
}

}  // namespace

Side otherSide(Side side) { return side == Side::kLeft ? Side::kRight : Side::kLeft; }

const char* sideName(Side side) { return side == Side::kLeft ? "left" : "right"; }

Cb5Model::Cb5Model(const Cb5Parameters& params) : PlanarChain(makeConfig(params)), params_(params) {}

double Cb5Model::legLength(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  const double sq = a * a + b * b + 2.0 * a * b * std::cos(q_knee);
  if (sq <= 0.0) throw SolverError("leg is fully folded, length undefined");
  return std::sqrt(sq);
}

double Cb5Model::legLengthDerivative(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  return -a * b * std::sin(q_knee) / legLength(q_knee);
}

double Cb5Model::legLengthSecondDerivative(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  const double len = legLength(q_knee);
  const double dlen = legLengthDerivative(q_knee);
  return (-a * b * std::cos(q_knee) - dlen * dlen) / len;
}

double Cb5Model::legPitchOffset(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  return std::atan2(b * std::sin(q_knee), a + b * std::cos(q_knee));
}

double Cb5Model::legPitchOffsetDerivative(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  const double len = legLength(q_knee);
  return (b * b + a * b * std::cos(q_knee)) / (len * len);
}

double Cb5Model::legPitchOffsetSecondDerivative(double q_knee) const {
  const double a = params_.thigh_length, b = params_.shin_length;
  const double len = legLength(q_knee);
  const double dlen = legLengthDerivative(q_knee);
  return (-a * b * std::sin(q_knee) - 2.0 * legPitchOffsetDerivative(q_knee) * len * dlen) /
         (len * len);
}

Eigen::VectorXd Cb5Model::symmetricPose(double knee_angle) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(9);
  const double hip = -legPitchOffset(knee_angle);
  q(kBaseZ) = legLength(knee_angle);
  q(kLeftHip) = hip;
  q(kLeftKnee) = knee_angle;
  q(kRightHip) = hip;
  q(kRightKnee) = knee_angle;
  return q;
}

Eigen::VectorXd Cb5Model::resetPositions(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  out(kLeftSpring) = 0.0;
  out(kRightSpring) = 0.0;
  return out;
}

Eigen::MatrixXd Cb5Model::resetVelocityMap(const Eigen::VectorXd& q) const {
  (void)q;
  Eigen::MatrixXd map = Eigen::MatrixXd::Identity(9, 9);
  map(kLeftSpring, kLeftSpring) = 0.0;
  map(kRightSpring, kRightSpring) = 0.0;
  return map;
}

std::vector<HolonomicConstraint> Cb5Model::constraintCatalog() const {
  std::vector<HolonomicConstraint> catalog;
  catalog.push_back(contactConstraint("foot_left", {0, 0}));
  catalog.push_back(contactConstraint("foot_right", {0, 0}));
  catalog.push_back(jointLockConstraint("spring_lock_left", kLeftSpring, 0.0));
  catalog.push_back(jointLockConstraint("spring_lock_right", kRightSpring, 0.0));
  catalog.push_back(distanceConstraint("interfoot_distance", "foot_left", "foot_right", 0.3));
  return catalog;
}

}  // namespace hzdclf
