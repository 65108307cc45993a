#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hzdclf/dynamics/robot_model.hpp"

namespace hzdclf {

// One rigid segment of a planar kinematic tree. The link frame sits at the
// proximal pivot; the joint coordinate is the rotation of this frame relative
// to the parent (absolute pitch for the link attached to a floating base).
struct PlanarLink {
  std::string name;
  int parent = -1;  // index into links, -1 attaches to the base
  Eigen::Vector2d joint_in_parent = Eigen::Vector2d::Zero();  // pivot in the parent frame
  double mass = 0.0;
  Eigen::Vector2d com = Eigen::Vector2d::Zero();  // in the link frame
  double inertia = 0.0;                           // about the com
};

struct PlanarMarker {
  std::string name;
  int link = 0;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();  // in the link frame
};

// Coordinates: (x, z, th_0, th_1, ..., th_{L-1}) with a floating base, or
// (th_0, ..., th_{L-1}) when the first pivot is pinned to the origin. Links
// must be listed parents-first.
struct PlanarChainConfig {
  bool floating_base = true;
  double gravity = 9.81;
  std::vector<PlanarLink> links;
  std::vector<PlanarMarker> markers;
  std::vector<SpringEntry> springs;
  Eigen::VectorXd rotor_inertia;      // per coordinate; empty means none
  std::vector<int> actuated_coords;   // columns of B, in order
};

// Closed-form planar tree dynamics. Every quantity (mass matrix, Christoffel
// Coriolis matrix, gravity vector, marker Jacobians and their derivatives) is
// evaluated analytically from the term expansion of point positions
//   p(q) = base + sum_t R(theta_t) d_t,
// so finite differencing appears only in the tests.
class PlanarChain : public RobotModel {
 public:
  explicit PlanarChain(PlanarChainConfig config);

  int numPositions() const override { return nq_; }
  int numActuators() const override { return static_cast<int>(config_.actuated_coords.size()); }

  Eigen::MatrixXd massMatrix(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd coriolisMatrix(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const override;
  Eigen::VectorXd gravityForces(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd actuationMatrix() const override;
  std::vector<SpringEntry> springs() const override { return config_.springs; }
  double potentialEnergy(const Eigen::VectorXd& q) const override;

  // d(massMatrix)/dq_coord; exposed for derivative checks.
  Eigen::MatrixXd massMatrixDerivative(const Eigen::VectorXd& q, int coord) const;

  int numLinks() const { return static_cast<int>(config_.links.size()); }
  int angleCoord(int link) const { return angle_coord_[link]; }
  bool floatingBase() const { return config_.floating_base; }
  double totalMass() const { return total_mass_; }
  const PlanarChainConfig& config() const { return config_; }

  double linkAngle(const Eigen::VectorXd& q, int link) const;

  Eigen::Vector2d markerPosition(const Eigen::VectorXd& q, const std::string& marker) const;
  Eigen::MatrixXd markerJacobian(const Eigen::VectorXd& q, const std::string& marker) const;
  Eigen::Vector2d markerVelocity(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const std::string& marker) const;
  Eigen::Vector2d markerJdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const std::string& marker) const;
  // d(markerJacobian)/dq_coord.
  Eigen::MatrixXd markerJacobianDerivative(const Eigen::VectorXd& q, const std::string& marker,
                                           int coord) const;

  Eigen::Vector2d comPosition(const Eigen::VectorXd& q) const;

  // Pins a marker to a world anchor (2 rows).
  HolonomicConstraint contactConstraint(const std::string& marker,
                                        const Eigen::Vector2d& anchor) const;
  // Freezes one coordinate at a target value (1 row).
  HolonomicConstraint jointLockConstraint(const std::string& name, int coord, double target) const;
  // Keeps two markers at a fixed separation (1 row).
  HolonomicConstraint distanceConstraint(const std::string& name, const std::string& marker_a,
                                         const std::string& marker_b, double distance) const;

 private:
  struct Term {
    Eigen::Vector2d d;
    int link;
  };
  struct Frames {
    std::vector<double> theta;
    std::vector<Eigen::Matrix2d> rot;
  };

  Frames frames(const Eigen::VectorXd& q) const;
  Eigen::Vector2d base(const Eigen::VectorXd& q) const;

  std::vector<Term> pointTerms(int link, const Eigen::Vector2d& point) const;
  Eigen::Vector2d termsPosition(const Frames& f, const Eigen::Vector2d& base,
                                const std::vector<Term>& terms) const;
  Eigen::MatrixXd termsJacobian(const Frames& f, const std::vector<Term>& terms) const;
  Eigen::Vector2d termsJdotQdot(const Frames& f, const Eigen::VectorXd& qd,
                                const std::vector<Term>& terms) const;
  Eigen::MatrixXd termsJacobianDerivative(const Frames& f, const std::vector<Term>& terms,
                                          int coord) const;

  int markerIndex(const std::string& marker) const;

  PlanarChainConfig config_;
  int nq_ = 0;
  double total_mass_ = 0.0;
  std::vector<int> angle_coord_;               // per link
  std::vector<std::vector<char>> angle_dep_;   // per link: does q_j rotate it
  std::vector<std::vector<Term>> com_terms_;   // per link
  std::vector<std::vector<Term>> marker_terms_;
  std::map<std::string, int> marker_index_;
};

}  // namespace hzdclf
