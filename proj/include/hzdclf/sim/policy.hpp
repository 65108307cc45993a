#pragma once

#include <Eigen/Dense>

#include "hzdclf/numeric/qp.hpp"
#include "hzdclf/sim/hybrid_system.hpp"

namespace hzdclf {

// Everything a controller cares to report about one control tick; the
// simulator copies it into traces and step records. Vector fields may stay
// empty when a policy has nothing to say.
struct TickInfo {
  double t = 0.0;
  double tau = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd eta;
  Eigen::VectorXd lambda;  // controller's wrench decision, when it has one
  double lyapunov = 0.0;
  double clf_margin = 0.0;
  double delta = 0.0;
  QpStatus status = QpStatus::kOptimal;
  bool fallback = false;
  double solve_time = 0.0;
  int iterations = 0;
};

// Per-step torque source driven by the hybrid simulator: beginStep runs once
// per domain (including the first), torque at the control rate with the
// result held between calls.
class SteppingPolicy {
 public:
  virtual ~SteppingPolicy() = default;

  virtual void beginStep(const Cb5WalkingDomain& domain, double t0, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qd) = 0;
  virtual Eigen::VectorXd torque(double t, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd) = 0;
  virtual const TickInfo& lastTick() const = 0;
};

}  // namespace hzdclf
