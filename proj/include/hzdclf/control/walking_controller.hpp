#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hzdclf/clf/res_clf.hpp"
#include "hzdclf/control/regulators.hpp"
#include "hzdclf/control/weights.hpp"
#include "hzdclf/control/whole_body.hpp"
#include "hzdclf/gait/gait_library.hpp"
#include "hzdclf/numeric/qp.hpp"
#include "hzdclf/sim/policy.hpp"

namespace hzdclf {

enum class ControlLaw {
  kTrackingQp,   // whole-body tracking program on the projected dynamics
  kFbl,          // exact input-output linearization
  kClfQp,        // torque-space min-norm program under the decay row
  kClfQpDelta,   // same with the penalized relaxation
  kIdQp          // inverse-dynamics tracking program, no decay row
};
const char* controlLawName(ControlLaw law);
ControlLaw controlLawFromName(const std::string& name);

struct WalkingControllerConfig {
  ControlLaw law = ControlLaw::kTrackingQp;
  ControllerWeights weights;  // default-initialized callers should use cb5Weights()
  RegulatorGains regulators;
  bool velocity_regulator = true;
  bool footstrike_regulator = true;
  bool force_regulator = true;
  // Enforce the decay condition as an inequality instead of (on top of) the
  // linear Vdot cost term; analysis runs use this.
  bool hard_clf_row = false;
  double w_hinge = 0.0;
  double command_vx = 0.0;
  double command_vy = 0.0;
};

// Gait-library tracking controller for the compliant planar biped. Each step
// it interpolates a node at the previous step's average velocity, mirrors it
// onto the active stance side, pins the reference to the post-impact state,
// and then tracks it at the control rate with the configured law, layering
// the velocity/footstrike/force regulators on the references. Solve failures
// fall back to the previous torque for one tick, then to zero torque.
class WalkingController : public SteppingPolicy {
 public:
  WalkingController(const Cb5Model& model, GaitLibrary library, WalkingControllerConfig config);

  void setCommand(double vx, double vy);
  const WalkingControllerConfig& config() const { return config_; }
  const ResClf& clf() const { return clf_; }

  // Valid after the first beginStep.
  const GaitNode& activeNode() const { return node_; }
  const OutputSet& outputs() const { return *outputs_; }
  bool lastQueryClamped() const { return query_clamped_; }

  void beginStep(const Cb5WalkingDomain& domain, double t0, const Eigen::VectorXd& q,
                 const Eigen::VectorXd& qd) override;
  Eigen::VectorXd torque(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) override;
  const TickInfo& lastTick() const override { return tick_; }

 private:
  Eigen::VectorXd solveLaw(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                           const OutputSet& outputs, const Eigen::VectorXd& x_star);
  Eigen::VectorXd referenceStack(double tau, Side stance) const;
  Eigen::VectorXd regWeights(Side stance) const;

  const Cb5Model* model_;
  GaitLibrary library_;
  WalkingControllerConfig config_;
  ResClf clf_;
  QpSolver solver_;

  // Per-step state.
  GaitNode node_;
  bool query_clamped_ = false;
  std::optional<OutputSet> outputs_;  // desired() is the repaired base curve
  ConstraintSet domain_constraints_;
  TrackingQpSetup setup_;
  Side stance_ = Side::kRight;
  Eigen::Vector2d anchor_ = Eigen::Vector2d::Zero();
  double step_t0_ = 0.0;
  Eigen::Vector2d step_start_base_ = Eigen::Vector2d::Zero();
  bool in_step_ = false;

  // Regulator state.
  RegulatorState reg_;
  double last_control_t_ = 0.0;

  // Fallback bookkeeping.
  std::optional<Eigen::VectorXd> last_good_u_;
  bool last_was_fallback_ = false;
  std::optional<Eigen::VectorXd> warm_start_;

  TickInfo tick_;
};

// Open-loop playback of a node's nominal torque profile, mirrored onto the
// active stance side. No feedback anywhere, which makes it the negative
// control of the stability analyses.
class FeedforwardPolicy : public SteppingPolicy {
 public:
  FeedforwardPolicy(const Cb5Model& model, GaitNode canonical_right);

  void beginStep(const Cb5WalkingDomain& domain, double t0, const Eigen::VectorXd& q,
                 const Eigen::VectorXd& qd) override;
  Eigen::VectorXd torque(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) override;
  const TickInfo& lastTick() const override { return tick_; }

 private:
  const Cb5Model* model_;
  GaitNode canonical_;
  GaitNode active_;
  double step_t0_ = 0.0;
  TickInfo tick_;
};

}  // namespace hzdclf
