#include "hzdclf/dynamics/constraint.hpp"

#include "hzdclf/errors.hpp"

namespace hzdclf {

ConstraintSet::ConstraintSet(std::vector<HolonomicConstraint> constraints) {
  for (auto& c : constraints) add(std::move(c));
}

void ConstraintSet::add(HolonomicConstraint constraint) {
  if (constraint.dim <= 0) {
    throw InvalidArgumentError("constraint '" + constraint.name + "' has nonpositive dimension");
  }
  if (!constraint.value || !constraint.jacobian || !constraint.jdot_qdot) {
    throw InvalidArgumentError("constraint '" + constraint.name + "' is missing a callable");
  }
  offsets_.push_back(total_dim_);
  total_dim_ += constraint.dim;
  constraints_.push_back(std::move(constraint));
}

Eigen::VectorXd ConstraintSet::value(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out(total_dim_);
  for (int i = 0; i < size(); ++i) out.segment(offsets_[i], constraints_[i].dim) = constraints_[i].value(q);
  return out;
}

Eigen::MatrixXd ConstraintSet::jacobian(const Eigen::VectorXd& q) const {
  Eigen::MatrixXd out(total_dim_, q.size());
  for (int i = 0; i < size(); ++i) {
    out.middleRows(offsets_[i], constraints_[i].dim) = constraints_[i].jacobian(q);
  }
  return out;
}

Eigen::VectorXd ConstraintSet::jdotQdot(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  Eigen::VectorXd out(total_dim_);
  for (int i = 0; i < size(); ++i) {
    out.segment(offsets_[i], constraints_[i].dim) = constraints_[i].jdot_qdot(q, qd);
  }
  return out;
}

std::string ConstraintSet::names() const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    if (i > 0) out += ", ";
    out += constraints_[i].name;
  }
  return out;
}

}  // namespace hzdclf
