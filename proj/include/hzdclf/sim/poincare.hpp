#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "hzdclf/sim/simulator.hpp"

namespace hzdclf {

// The analysis section is the start of a right-stance step, just after
// impact. Both spring deflections and rates are zero there by construction
// of the reset map, the stance foot is pinned, and horizontal position is
// quotiented out, so twelve numbers chart the section:
//   0 torso pitch, 1 stance hip, 2 stance knee, 3 stance spring,
//   4 swing hip, 5 swing knee, then the same six rates.
// Chart velocities are free; the base rates and the swing-spring rate follow
// from the domain's three velocity constraints.
inline constexpr int kPoincareDim = 12;

Eigen::VectorXd poincareChart(const Cb5Model& model, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd);

// Inverse chart: the unique section state with the stance foot at the origin.
void poincareState(const Cb5Model& model, const Eigen::VectorXd& chart, Eigen::VectorXd* q,
                   Eigen::VectorXd* qd);

// Fresh controller per map evaluation, so every evaluation sees identical
// internal state and the map is a deterministic function of the chart point.
using PolicyFactory = std::function<std::unique_ptr<SteppingPolicy>()>;

// Return map of the closed-loop hybrid system: flow from the section through
// two impacts (one per leg) back to right stance.
class PoincareMap {
 public:
  PoincareMap(const Cb5Model& model, PolicyFactory factory, SimOptions options);

  // Throws SolverError when the run falls or aborts before completing both
  // steps; stability analysis treats that as divergence.
  Eigen::VectorXd apply(const Eigen::VectorXd& chart) const;

  const Cb5Model& model() const { return *model_; }

 private:
  const Cb5Model* model_;
  PolicyFactory factory_;
  SimOptions options_;
};

struct OrbitalStability {
  Eigen::MatrixXd jacobian;  // central differences, kPoincareDim square
  Eigen::VectorXcd eigenvalues;
  double spectral_radius = 0.0;
  double residual = 0.0;  // max |P(x) - x| at the evaluation point
};

OrbitalStability orbitalStability(const PoincareMap& map, const Eigen::VectorXd& chart_point,
                                  double h = 1e-4);

}  // namespace hzdclf
