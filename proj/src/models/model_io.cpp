#include "hzdclf/models/model_io.hpp"

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"

namespace hzdclf {

namespace {
constexpr const char* kSchema = "hzdclf-model-v1";

nlohmann::json point2(const Eigen::Vector2d& v) { return nlohmann::json::array({v.x(), v.y()}); }

Eigen::Vector2d point2At(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const Eigen::VectorXd v = vectorAt(j, key, where, 2);
  return {v(0), v(1)};
}
}  // namespace

GenericPlanarModel::GenericPlanarModel(std::string name, PlanarChainConfig config,
                                       std::vector<int> reset_zero_coords,
                                       std::vector<ConstraintSpec> catalog, double friction_mu,
                                       double torque_limit)
    : PlanarChain(std::move(config)),
      name_(std::move(name)),
      reset_zero_coords_(std::move(reset_zero_coords)),
      catalog_(std::move(catalog)),
      friction_mu_(friction_mu),
      torque_limit_(torque_limit) {
  for (int c : reset_zero_coords_) {
    if (c < 0 || c >= numPositions()) throw InvalidArgumentError("reset coordinate out of range");
  }
  if (friction_mu_ <= 0.0) throw InvalidArgumentError("friction_mu must be positive");
  if (torque_limit_ < 0.0) throw InvalidArgumentError("torque_limit must be nonnegative");
  for (const auto& spec : catalog_) makeConstraint(spec);  // validate eagerly
}

HolonomicConstraint GenericPlanarModel::makeConstraint(const ConstraintSpec& spec) const {
  HolonomicConstraint c;
  if (spec.type == "contact") {
    c = contactConstraint(spec.marker, spec.anchor);
  } else if (spec.type == "joint_lock") {
    c = jointLockConstraint(spec.name, spec.coord, spec.target);
  } else if (spec.type == "distance") {
    c = distanceConstraint(spec.name, spec.marker_a, spec.marker_b, spec.distance);
  } else {
    throw InvalidArgumentError("unknown constraint type '" + spec.type + "'");
  }
  c.name = spec.name;
  return c;
}

Eigen::VectorXd GenericPlanarModel::resetPositions(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  for (int c : reset_zero_coords_) out(c) = 0.0;
  return out;
}

Eigen::MatrixXd GenericPlanarModel::resetVelocityMap(const Eigen::VectorXd& q) const {
  (void)q;
  Eigen::MatrixXd map = Eigen::MatrixXd::Identity(numPositions(), numPositions());
  for (int c : reset_zero_coords_) map(c, c) = 0.0;
  return map;
}

std::vector<HolonomicConstraint> GenericPlanarModel::constraintCatalog() const {
  std::vector<HolonomicConstraint> catalog;
  catalog.reserve(catalog_.size());
  for (const auto& spec : catalog_) catalog.push_back(makeConstraint(spec));
  return catalog;
}

nlohmann::json modelToJson(const GenericPlanarModel& model) {
  const PlanarChainConfig& cfg = model.config();
  nlohmann::json j;
  j["schema"] = kSchema;
  j["name"] = model.name();
  j["floating_base"] = cfg.floating_base;
  j["gravity"] = cfg.gravity;
  j["friction_mu"] = model.frictionMu();
  j["torque_limit"] = model.torqueLimit();

  j["links"] = nlohmann::json::array();
  for (const auto& link : cfg.links) {
    j["links"].push_back({{"name", link.name},
                          {"parent", link.parent},
                          {"joint_in_parent", point2(link.joint_in_parent)},
                          {"mass", link.mass},
                          {"com", point2(link.com)},
                          {"inertia", link.inertia}});
  }
  j["markers"] = nlohmann::json::array();
  for (const auto& m : cfg.markers) {
    j["markers"].push_back({{"name", m.name}, {"link", m.link}, {"point", point2(m.point)}});
  }
  j["springs"] = nlohmann::json::array();
  for (const auto& s : cfg.springs) {
    j["springs"].push_back(
        {{"coord", s.coord}, {"stiffness", s.stiffness}, {"damping", s.damping}});
  }
  j["rotor_inertia"] = toJson(cfg.rotor_inertia);
  j["actuated_coords"] = cfg.actuated_coords;
  j["reset_zero_coords"] = model.resetZeroCoords();

  j["constraints"] = nlohmann::json::array();
  for (const auto& c : model.catalogSpecs()) {
    nlohmann::json e{{"name", c.name}, {"type", c.type}};
    if (c.type == "contact") {
      e["marker"] = c.marker;
      e["anchor"] = point2(c.anchor);
    } else if (c.type == "joint_lock") {
      e["coord"] = c.coord;
      e["target"] = c.target;
    } else if (c.type == "distance") {
      e["marker_a"] = c.marker_a;
      e["marker_b"] = c.marker_b;
      e["distance"] = c.distance;
    }
    j["constraints"].push_back(e);
  }
  return j;
}

std::shared_ptr<GenericPlanarModel> modelFromJson(const nlohmann::json& j) {
  const std::string where = "model file";
  requireSchema(j, kSchema, where);
  requireKeysIn(j,
                {"schema", "name", "floating_base", "gravity", "friction_mu", "torque_limit",
                 "links", "markers", "springs", "rotor_inertia", "actuated_coords",
                 "reset_zero_coords", "constraints"},
                where);

  PlanarChainConfig cfg;
  cfg.floating_base = boolAt(j, "floating_base", where);
  cfg.gravity = numberAt(j, "gravity", where);

  for (const auto& lj : requireKey(j, "links", where)) {
    requireKeysIn(lj, {"name", "parent", "joint_in_parent", "mass", "com", "inertia"}, "link");
    PlanarLink link;
    link.name = stringAt(lj, "name", "link");
    link.parent = intAt(lj, "parent", "link");
    link.joint_in_parent = point2At(lj, "joint_in_parent", "link");
    link.mass = numberAt(lj, "mass", "link");
    link.com = point2At(lj, "com", "link");
    link.inertia = numberAt(lj, "inertia", "link");
    cfg.links.push_back(link);
  }
  for (const auto& mj : requireKey(j, "markers", where)) {
    requireKeysIn(mj, {"name", "link", "point"}, "marker");
    cfg.markers.push_back(
        {stringAt(mj, "name", "marker"), intAt(mj, "link", "marker"), point2At(mj, "point", "marker")});
  }
  for (const auto& sj : requireKey(j, "springs", where)) {
    requireKeysIn(sj, {"coord", "stiffness", "damping"}, "spring");
    cfg.springs.push_back({intAt(sj, "coord", "spring"), numberAt(sj, "stiffness", "spring"),
                           numberAt(sj, "damping", "spring")});
  }
  cfg.rotor_inertia = vectorAt(j, "rotor_inertia", where);
  for (const auto& c : requireKey(j, "actuated_coords", where)) {
    cfg.actuated_coords.push_back(c.get<int>());
  }

  std::vector<int> reset_zero;
  for (const auto& c : requireKey(j, "reset_zero_coords", where)) reset_zero.push_back(c.get<int>());

  std::vector<ConstraintSpec> catalog;
  for (const auto& cj : requireKey(j, "constraints", where)) {
    ConstraintSpec spec;
    spec.name = stringAt(cj, "name", "constraint");
    spec.type = stringAt(cj, "type", "constraint");
    if (spec.type == "contact") {
      requireKeysIn(cj, {"name", "type", "marker", "anchor"}, "constraint");
      spec.marker = stringAt(cj, "marker", "constraint");
      spec.anchor = point2At(cj, "anchor", "constraint");
    } else if (spec.type == "joint_lock") {
      requireKeysIn(cj, {"name", "type", "coord", "target"}, "constraint");
      spec.coord = intAt(cj, "coord", "constraint");
      spec.target = numberAt(cj, "target", "constraint");
    } else if (spec.type == "distance") {
      requireKeysIn(cj, {"name", "type", "marker_a", "marker_b", "distance"}, "constraint");
      spec.marker_a = stringAt(cj, "marker_a", "constraint");
      spec.marker_b = stringAt(cj, "marker_b", "constraint");
      spec.distance = numberAt(cj, "distance", "constraint");
    } else {
      throw ConfigError("constraint: unknown type \"" + spec.type + "\"");
    }
    catalog.push_back(spec);
  }

  try {
    return std::make_shared<GenericPlanarModel>(stringAt(j, "name", where), std::move(cfg),
                                                std::move(reset_zero), std::move(catalog),
                                                numberAt(j, "friction_mu", where),
                                                numberAt(j, "torque_limit", where));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(where + std::string(": ") + e.what());
  }
}

std::shared_ptr<GenericPlanarModel> loadModel(const std::string& path) {
  return modelFromJson(readJsonFile(path));
}

void saveModel(const GenericPlanarModel& model, const std::string& path) {
  writeJsonFile(path, modelToJson(model));
}

nlohmann::json cb5ModelJson(const Cb5Parameters& params) {
  const Cb5Model cb5(params);
  std::vector<ConstraintSpec> catalog;
  {
    ConstraintSpec c;
    c.name = "contact_foot_left";
    c.type = "contact";
    c.marker = "foot_left";
    catalog.push_back(c);
    c.name = "contact_foot_right";
    c.marker = "foot_right";
    catalog.push_back(c);
  }
  {
    ConstraintSpec c;
    c.type = "joint_lock";
    c.name = "spring_lock_left";
    c.coord = Cb5Model::kLeftSpring;
    catalog.push_back(c);
    c.name = "spring_lock_right";
    c.coord = Cb5Model::kRightSpring;
    catalog.push_back(c);
  }
  {
    ConstraintSpec c;
    c.type = "distance";
    c.name = "interfoot_distance";
    c.marker_a = "foot_left";
    c.marker_b = "foot_right";
    c.distance = 0.3;
    catalog.push_back(c);
  }
  const GenericPlanarModel generic("cb5", cb5.config(),
                                   {Cb5Model::kLeftSpring, Cb5Model::kRightSpring},
                                   std::move(catalog), params.friction_mu, params.torque_limit);
  return modelToJson(generic);
}

Cb5Parameters cb5ParametersFromJson(const nlohmann::json& j) {
  const auto model = modelFromJson(j);
  if (model->name() != "cb5" || model->numPositions() != 9 || model->numLinks() != 7) {
    throw ConfigError("model file does not describe the cb5 layout");
  }
  const PlanarChainConfig& cfg = model->config();
  Cb5Parameters p;
  p.torso_mass = cfg.links[0].mass;
  p.torso_com_offset = cfg.links[0].com.y();
  p.torso_inertia = cfg.links[0].inertia;
  p.thigh_mass = cfg.links[1].mass;
  p.thigh_length = -cfg.links[2].joint_in_parent.y();
  p.thigh_inertia = cfg.links[1].inertia;
  p.shin_length = -2.0 * cfg.links[3].joint_in_parent.y();
  p.shin_half_mass = cfg.links[2].mass;
  p.shin_half_inertia = cfg.links[2].inertia;
  p.rotor_inertia = cfg.rotor_inertia(Cb5Model::kLeftHip);
  if (cfg.springs.empty()) throw ConfigError("cb5 model file lists no springs");
  p.spring_stiffness = cfg.springs[0].stiffness;
  p.spring_damping = cfg.springs[0].damping;
  p.gravity = cfg.gravity;
  p.friction_mu = model->frictionMu();
  p.torque_limit = model->torqueLimit();
  return p;
}

}  // namespace hzdclf
