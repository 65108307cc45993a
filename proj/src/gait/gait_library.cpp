#include "hzdclf/gait/gait_library.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"

namespace hzdclf {
namespace {

void checkGrid(const std::vector<double>& grid, const char* axis) {
  if (grid.empty()) {
    throw InvalidArgumentError(std::string("GaitLibrary: empty ") + axis + " grid");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw InvalidArgumentError(std::string("GaitLibrary: ") + axis +
                                 " grid must be strictly increasing");
    }
  }
}

void checkSameShape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* block) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgumentError(std::string("GaitLibrary: nodes disagree on the shape of ") +
                               block);
  }
}

// Linear blend of two nodes; metadata survives only when present on both
// sides with matching sizes.
GaitNode lerpNode(const GaitNode& a, const GaitNode& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  GaitNode out;
  const double s = 1.0 - t;
  out.vx = s * a.vx + t * b.vx;
  out.vy = s * a.vy + t * b.vy;
  out.duration = s * a.duration + t * b.duration;
  out.alpha_y = s * a.alpha_y + t * b.alpha_y;
  out.alpha_p = s * a.alpha_p + t * b.alpha_p;
  out.alpha_v = s * a.alpha_v + t * b.alpha_v;
  out.alpha_qdd = s * a.alpha_qdd + t * b.alpha_qdd;
  out.alpha_u = s * a.alpha_u + t * b.alpha_u;
  out.alpha_lambda = s * a.alpha_lambda + t * b.alpha_lambda;
  if (a.x_section.size() > 0 && a.x_section.size() == b.x_section.size()) {
    out.x_section = s * a.x_section + t * b.x_section;
  }
  if (a.x_preimpact.size() > 0 && a.x_preimpact.size() == b.x_preimpact.size()) {
    out.x_preimpact = s * a.x_preimpact + t * b.x_preimpact;
  }
  return out;
}

// Bracket index and fraction for a clamped query.
std::pair<int, double> locate(const std::vector<double>& grid, double v, bool* clamped) {
  if (v < grid.front() || v > grid.back()) *clamped = true;
  if (grid.size() == 1) return {0, 0.0};
  if (v <= grid.front()) return {0, 0.0};
  if (v >= grid.back()) return {static_cast<int>(grid.size()) - 2, 1.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), v);
  const int i = static_cast<int>(it - grid.begin()) - 1;
  const double t = (v - grid[i]) / (grid[i + 1] - grid[i]);
  return {i, t};
}

nlohmann::json nodeToJson(const GaitNode& node) {
  nlohmann::json j;
  j["vx"] = node.vx;
  j["vy"] = node.vy;
  j["duration"] = node.duration;
  j["alpha_y"] = matrixToJson(node.alpha_y);
  j["alpha_p"] = matrixToJson(node.alpha_p);
  j["alpha_v"] = matrixToJson(node.alpha_v);
  j["alpha_qdd"] = matrixToJson(node.alpha_qdd);
  j["alpha_u"] = matrixToJson(node.alpha_u);
  j["alpha_lambda"] = matrixToJson(node.alpha_lambda);
  if (node.x_section.size() > 0) j["x_section"] = toJson(node.x_section);
  if (node.x_preimpact.size() > 0) j["x_preimpact"] = toJson(node.x_preimpact);
  return j;
}

GaitNode nodeFromJson(const nlohmann::json& j, const std::string& where) {
  requireKeysIn(j,
                {"vx", "vy", "duration", "alpha_y", "alpha_p", "alpha_v", "alpha_qdd", "alpha_u",
                 "alpha_lambda", "x_section", "x_preimpact"},
                where);
  GaitNode node;
  node.vx = numberAt(j, "vx", where);
  node.vy = numberAt(j, "vy", where);
  node.duration = numberAt(j, "duration", where);
  node.alpha_y = matrixFromJson(requireKey(j, "alpha_y", where), where + ".alpha_y");
  node.alpha_p = matrixFromJson(requireKey(j, "alpha_p", where), where + ".alpha_p");
  node.alpha_v = matrixFromJson(requireKey(j, "alpha_v", where), where + ".alpha_v");
  node.alpha_qdd = matrixFromJson(requireKey(j, "alpha_qdd", where), where + ".alpha_qdd");
  node.alpha_u = matrixFromJson(requireKey(j, "alpha_u", where), where + ".alpha_u");
  node.alpha_lambda =
      matrixFromJson(requireKey(j, "alpha_lambda", where), where + ".alpha_lambda");
  if (j.contains("x_section")) node.x_section = vectorAt(j, "x_section", where);
  if (j.contains("x_preimpact")) node.x_preimpact = vectorAt(j, "x_preimpact", where);
  return node;
}

}  // namespace

GaitLibrary::GaitLibrary(std::vector<double> vx_grid, std::vector<double> vy_grid,
                         std::vector<GaitNode> nodes)
    : vx_grid_(std::move(vx_grid)), vy_grid_(std::move(vy_grid)), nodes_(std::move(nodes)) {
  checkGrid(vx_grid_, "vx");
  checkGrid(vy_grid_, "vy");
  if (nodes_.size() != vx_grid_.size() * vy_grid_.size()) {
    throw InvalidArgumentError("GaitLibrary: node count does not match the grid");
  }
  const GaitNode& ref = nodes_.front();
  if (ref.alpha_y.rows() == 0 || ref.alpha_y.cols() < 2) {
    throw InvalidArgumentError("GaitLibrary: alpha_y must be a nonempty coefficient matrix");
  }
  for (const GaitNode& n : nodes_) {
    if (!(n.duration > 0.0)) throw InvalidArgumentError("GaitLibrary: nonpositive duration");
    checkSameShape(ref.alpha_y, n.alpha_y, "alpha_y");
    checkSameShape(ref.alpha_p, n.alpha_p, "alpha_p");
    checkSameShape(ref.alpha_v, n.alpha_v, "alpha_v");
    checkSameShape(ref.alpha_qdd, n.alpha_qdd, "alpha_qdd");
    checkSameShape(ref.alpha_u, n.alpha_u, "alpha_u");
    checkSameShape(ref.alpha_lambda, n.alpha_lambda, "alpha_lambda");
  }
}

GaitLibrary GaitLibrary::single(GaitNode node) {
  const double vx = node.vx;
  const double vy = node.vy;
  return GaitLibrary({vx}, {vy}, {std::move(node)});
}

const GaitNode& GaitLibrary::node(int ix, int iy) const {
  const int nx = static_cast<int>(vx_grid_.size());
  const int ny = static_cast<int>(vy_grid_.size());
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) {
    throw InvalidArgumentError("GaitLibrary: node index out of range");
  }
  return nodes_[static_cast<size_t>(ix) * ny + iy];
}

GaitQuery GaitLibrary::interpolate(double vx, double vy) const {
  GaitQuery query;
  const auto [ix, tx] = locate(vx_grid_, vx, &query.clamped);
  const auto [iy, ty] = locate(vy_grid_, vy, &query.clamped);

  const bool have_x = vx_grid_.size() > 1;
  const bool have_y = vy_grid_.size() > 1;
  if (!have_x && !have_y) {
    query.node = node(0, 0);
  } else if (have_x && !have_y) {
    query.node = lerpNode(node(ix, 0), node(ix + 1, 0), tx);
  } else if (!have_x && have_y) {
    query.node = lerpNode(node(0, iy), node(0, iy + 1), ty);
  } else {
    const GaitNode low = lerpNode(node(ix, iy), node(ix + 1, iy), tx);
    const GaitNode high = lerpNode(node(ix, iy + 1), node(ix + 1, iy + 1), tx);
    query.node = lerpNode(low, high, ty);
  }
  return query;
}

nlohmann::json GaitLibrary::toJson() const {
  nlohmann::json j;
  j["schema"] = "hzdclf-gaitlib-v1";
  j["vx_grid"] = vx_grid_;
  j["vy_grid"] = vy_grid_;
  nlohmann::json nodes = nlohmann::json::array();
  for (const GaitNode& n : nodes_) nodes.push_back(nodeToJson(n));
  j["nodes"] = std::move(nodes);
  return j;
}

GaitLibrary GaitLibrary::fromJson(const nlohmann::json& j, const std::string& where) {
  requireSchema(j, "hzdclf-gaitlib-v1", where);
  requireKeysIn(j, {"schema", "vx_grid", "vy_grid", "nodes"}, where);
  std::vector<double> vx_grid;
  std::vector<double> vy_grid;
  const Eigen::VectorXd vx = vectorAt(j, "vx_grid", where);
  const Eigen::VectorXd vy = vectorAt(j, "vy_grid", where);
  vx_grid.assign(vx.data(), vx.data() + vx.size());
  vy_grid.assign(vy.data(), vy.data() + vy.size());

  const nlohmann::json& nodes_json = requireKey(j, "nodes", where);
  if (!nodes_json.is_array()) throw ConfigError(where + ": nodes must be an array");
  std::vector<GaitNode> nodes;
  nodes.reserve(nodes_json.size());
  int k = 0;
  for (const auto& nj : nodes_json) {
    nodes.push_back(nodeFromJson(nj, where + ".nodes[" + std::to_string(k++) + "]"));
  }
  try {
    return GaitLibrary(std::move(vx_grid), std::move(vy_grid), std::move(nodes));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

GaitLibrary loadGaitLibrary(const std::string& path) {
  return GaitLibrary::fromJson(readJsonFile(path), path);
}

void saveGaitLibrary(const std::string& path, const GaitLibrary& library) {
  writeJsonFile(path, library.toJson());
}

GaitNode cb5MirrorNode(const GaitNode& node) {
  GaitNode out = node;
  const auto swapLegRows = [](Eigen::MatrixXd& m) {
    if (m.rows() != 9) {
      throw InvalidArgumentError("cb5MirrorNode: expected 9 coordinate rows");
    }
    for (int r = 0; r < 3; ++r) m.row(Cb5Model::kLeftHip + r).swap(m.row(Cb5Model::kRightHip + r));
  };
  const auto swapLegEntries = [](Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    if (v.size() != 18) {
      throw InvalidArgumentError("cb5MirrorNode: expected an 18-entry state");
    }
    for (int r = 0; r < 3; ++r) {
      std::swap(v(Cb5Model::kLeftHip + r), v(Cb5Model::kRightHip + r));
      std::swap(v(9 + Cb5Model::kLeftHip + r), v(9 + Cb5Model::kRightHip + r));
    }
  };

  swapLegRows(out.alpha_qdd);
  if (out.alpha_u.rows() != 4) {
    throw InvalidArgumentError("cb5MirrorNode: expected 4 torque rows");
  }
  out.alpha_u.row(0).swap(out.alpha_u.row(2));
  out.alpha_u.row(1).swap(out.alpha_u.row(3));
  swapLegEntries(out.x_section);
  swapLegEntries(out.x_preimpact);
  return out;
}

}  // namespace hzdclf
