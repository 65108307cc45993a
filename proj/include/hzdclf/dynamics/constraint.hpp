#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace hzdclf {

enum class ConstraintKind { kContact, kJointLock, kClosure };

// Whether a constraint is enforced exactly (as a dynamics equality) or moved
// into a controller cost as a weighted residual. Simulation always treats its
// active set as hard; the split only matters to controllers.
enum class ConstraintHardness { kHard, kSoft };

enum class WrenchLayout {
  kNone,         // not a contact
  kPointPlanar,  // (fx, fz)
  kPoint3D,      // (fx, fy, fz)
  kLine3D        // (fx, fy, fz, my, mz)
};

// A holonomic constraint c(q) = 0 described by callables. The value function
// is written so that 0 means satisfied (references such as contact anchors
// are baked in at construction). Instances returned by model factories hold a
// pointer to their model, which must outlive them.
struct HolonomicConstraint {
  std::string name;
  ConstraintKind kind = ConstraintKind::kContact;
  ConstraintHardness hardness = ConstraintHardness::kHard;
  WrenchLayout layout = WrenchLayout::kNone;
  int dim = 0;

  std::function<Eigen::VectorXd(const Eigen::VectorXd& q)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& q)> jacobian;
  // The bias acceleration d/dt(J_c) * qdot, so that the acceleration-level
  // constraint reads J_c qddot + jdot_qdot = 0.
  std::function<Eigen::VectorXd(const Eigen::VectorXd& q, const Eigen::VectorXd& qd)> jdot_qdot;
};

// An ordered stack of holonomic constraints active in one domain.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<HolonomicConstraint> constraints);

  void add(HolonomicConstraint constraint);

  int size() const { return static_cast<int>(constraints_.size()); }
  bool empty() const { return constraints_.empty(); }
  int totalDim() const { return total_dim_; }
  const HolonomicConstraint& operator[](int i) const { return constraints_[i]; }
  const std::vector<HolonomicConstraint>& entries() const { return constraints_; }

  // Row offset of constraint i in the stacked quantities below.
  int rowOffset(int i) const { return offsets_[i]; }

  Eigen::VectorXd value(const Eigen::VectorXd& q) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& q) const;
  Eigen::VectorXd jdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  // "a, b, c" listing for diagnostics.
  std::string names() const;

 private:
  std::vector<HolonomicConstraint> constraints_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

}  // namespace hzdclf
