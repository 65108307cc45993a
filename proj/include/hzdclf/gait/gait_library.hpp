#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

#include "hzdclf/models/cb5.hpp"
#include "hzdclf/outputs/bezier.hpp"

namespace hzdclf {

// One periodic step at a commanded velocity, stored in stance-canonical form
// (right stance). Every block is a Bezier coefficient matrix over the step
// phase; rows:
//   alpha_y       outputs (reference the controller tracks)
//   alpha_p       base position relative to the stance foot
//   alpha_v       base velocity
//   alpha_qdd     nominal accelerations (all coordinates)
//   alpha_u       nominal torques
//   alpha_lambda  nominal reaction and stance-spring wrenches
// x_section and x_preimpact optionally carry the fixed-point state (q, qd)
// at the step start and just before impact, for boundary checks and for
// seeding simulations.
struct GaitNode {
  double vx = 0.0;
  double vy = 0.0;
  double duration = 0.4;
  Eigen::MatrixXd alpha_y;
  Eigen::MatrixXd alpha_p;
  Eigen::MatrixXd alpha_v;
  Eigen::MatrixXd alpha_qdd;
  Eigen::MatrixXd alpha_u;
  Eigen::MatrixXd alpha_lambda;
  Eigen::VectorXd x_section;    // may be empty
  Eigen::VectorXd x_preimpact;  // may be empty

  BezierCurve outputCurve() const { return BezierCurve{alpha_y, duration}; }
};

struct GaitQuery {
  GaitNode node;
  bool clamped = false;  // the command fell outside the grid hull
};

// Rectangular grid of gait nodes over commanded (vx, vy), bilinearly
// interpolated (sagittal bracket first, then coronal). Queries outside the
// hull clamp to it and say so. Degenerate axes with a single entry reduce to
// linear or constant interpolation.
class GaitLibrary {
 public:
  GaitLibrary(std::vector<double> vx_grid, std::vector<double> vy_grid,
              std::vector<GaitNode> nodes);
  static GaitLibrary single(GaitNode node);

  const std::vector<double>& vxGrid() const { return vx_grid_; }
  const std::vector<double>& vyGrid() const { return vy_grid_; }
  int numNodes() const { return static_cast<int>(nodes_.size()); }
  // Grid storage is vx-major: node(i, j) sits at index i * |vy_grid| + j.
  const GaitNode& node(int ix, int iy) const;

  GaitQuery interpolate(double vx, double vy) const;

  nlohmann::json toJson() const;
  static GaitLibrary fromJson(const nlohmann::json& j, const std::string& where);

 private:
  std::vector<double> vx_grid_;
  std::vector<double> vy_grid_;
  std::vector<GaitNode> nodes_;
};

GaitLibrary loadGaitLibrary(const std::string& path);
void saveGaitLibrary(const std::string& path, const GaitLibrary& library);

// Left-stance version of a canonical right-stance node for the planar biped:
// leg-indexed blocks swap legs, stance-indexed blocks (outputs, base motion,
// wrenches) are already side-free. Involutive.
GaitNode cb5MirrorNode(const GaitNode& node);

}  // namespace hzdclf
