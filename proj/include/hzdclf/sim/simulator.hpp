#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hzdclf/sim/policy.hpp"
#include "hzdclf/sim/trace.hpp"

namespace hzdclf {

struct SimOptions {
  double dt = 1e-4;              // physics step
  double control_period = 1e-3;  // zero-order-hold torque update
  double max_time = 10.0;
  int max_steps = 0;  // stop after this many footfalls; 0 means no cap
  double guard_bisection_tol = 1e-12;  // seconds
  double min_base_height = 0.3;        // below this the run counts as a fall
  double max_speed = 1e3;              // velocity blow-up abort
  // Post-impact interval inside which plant-side admissibility violations are
  // expected (impact transients) and not counted against the run.
  double impact_grace = 2e-3;
};

// Plant-side reaction-force check that failed at one control tick.
struct AdmissibilityEvent {
  double t = 0.0;
  int step_index = 0;
  double time_since_impact = 0.0;
  double margin = 0.0;  // worst pyramid row, negative here by definition
  bool in_grace_window = false;
};

struct StepRecord {
  int index = 0;
  Side stance = Side::kRight;
  double t_start = 0.0;
  double t_end = 0.0;
  double impact_speed = 0.0;          // swing-foot descent rate at the guard
  Eigen::Vector2d average_velocity = Eigen::Vector2d::Zero();  // base (x, z)
  double min_normal_force = 0.0;      // plant reaction over the step
  double min_friction_margin = 0.0;
  double max_abs_eta = 0.0;
  double max_lyapunov = 0.0;
  int fallback_ticks = 0;
};

// One control tick, kept when SimOptions asks for it.
struct TickSample {
  double t = 0.0;
  double tau = 0.0;
  int step_index = 0;
  Side stance = Side::kRight;
  double lyapunov = 0.0;
  double eta_norm = 0.0;
  double clf_margin = 0.0;
  double normal_force = 0.0;
  double friction_margin = 0.0;
  double solve_time = 0.0;
  bool fallback = false;
  Eigen::VectorXd u;
};

struct SimulationResult {
  bool completed = false;
  std::string abort_reason;  // empty when completed
  double t_final = 0.0;
  Eigen::VectorXd q_final;
  Eigen::VectorXd qd_final;
  std::vector<StepRecord> steps;
  std::vector<AdmissibilityEvent> admissibility_events;
  std::vector<TickSample> ticks;  // only with keep_ticks
  double mean_abs_eta = 0.0;
  double max_lyapunov = 0.0;
  long tick_count = 0;
};

// Runs the closed-loop hybrid system from the given state: fixed-step
// integration of the pinned dynamics under a zero-order-hold policy torque,
// guard detection with bisection to the impact time, plastic impact and
// domain swap. The policy's beginStep runs once up front and after every
// impact. Throws only on caller errors; solver blow-ups end the run with
// completed = false and the last good state.
SimulationResult runWalk(const Cb5Model& model, SteppingPolicy& policy,
                         const Cb5WalkingDomain& initial_domain, double t0,
                         const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                         const SimOptions& options, bool keep_ticks = false,
                         TraceWriter* trace = nullptr);

}  // namespace hzdclf
