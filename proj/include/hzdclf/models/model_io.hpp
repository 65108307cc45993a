#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "hzdclf/models/cb5.hpp"
#include "hzdclf/models/planar_chain.hpp"

namespace hzdclf {

// Declarative form of a catalog constraint, reconstructable from JSON.
struct ConstraintSpec {
  std::string name;
  std::string type;  // "contact", "joint_lock", "distance"
  // contact
  std::string marker;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
  // joint_lock
  int coord = 0;
  double target = 0.0;
  // distance
  std::string marker_a;
  std::string marker_b;
  double distance = 0.0;
};

// A planar model defined entirely by data: chain parameters plus a reset rule
// (coordinates zeroed at impact) and a declarative constraint catalog.
class GenericPlanarModel : public PlanarChain {
 public:
  GenericPlanarModel(std::string name, PlanarChainConfig config,
                     std::vector<int> reset_zero_coords, std::vector<ConstraintSpec> catalog,
                     double friction_mu, double torque_limit);

  const std::string& name() const { return name_; }
  double frictionMu() const { return friction_mu_; }
  double torqueLimit() const { return torque_limit_; }
  const std::vector<int>& resetZeroCoords() const { return reset_zero_coords_; }
  const std::vector<ConstraintSpec>& catalogSpecs() const { return catalog_; }

  HolonomicConstraint makeConstraint(const ConstraintSpec& spec) const;

  Eigen::VectorXd resetPositions(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd resetVelocityMap(const Eigen::VectorXd& q) const override;
  std::vector<HolonomicConstraint> constraintCatalog() const override;

 private:
  std::string name_;
  std::vector<int> reset_zero_coords_;
  std::vector<ConstraintSpec> catalog_;
  double friction_mu_ = 0.6;
  double torque_limit_ = 0.0;  // 0 disables the bound
};

// Strict "hzdclf-model-v1" (de)serialization; unknown fields are rejected.
nlohmann::json modelToJson(const GenericPlanarModel& model);
std::shared_ptr<GenericPlanarModel> modelFromJson(const nlohmann::json& j);
std::shared_ptr<GenericPlanarModel> loadModel(const std::string& path);
void saveModel(const GenericPlanarModel& model, const std::string& path);

// The compliant biped expressed in the file format, and the inverse used by
// tools that need the typed parameters back from a model file.
nlohmann::json cb5ModelJson(const Cb5Parameters& params = Cb5Parameters());
Cb5Parameters cb5ParametersFromJson(const nlohmann::json& j);

}  // namespace hzdclf
