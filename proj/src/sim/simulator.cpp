#include "hzdclf/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hzdclf/dynamics/contact.hpp"
#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/errors.hpp"
#include "hzdclf/sim/integrator.hpp"

namespace hzdclf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> traceColumns(int nq, int nu) {
  std::vector<std::string> cols = {"t", "step", "stance", "tau"};
  for (int i = 0; i < nq; ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < nq; ++i) cols.push_back("qd" + std::to_string(i));
  for (int i = 0; i < nu; ++i) cols.push_back("u" + std::to_string(i));
  cols.insert(cols.end(), {"V", "eta_norm", "clf_margin", "delta", "normal_force",
                           "friction_margin", "solve_time", "fallback"});
  return cols;
}

struct StepScratch {
  double min_normal_force = kInf;
  double min_friction_margin = kInf;
  double max_abs_eta = 0.0;
  double max_lyapunov = 0.0;
  int fallback_ticks = 0;

  void reset() { *this = StepScratch(); }
};

}  // namespace

SimulationResult runWalk(const Cb5Model& model, SteppingPolicy& policy,
                         const Cb5WalkingDomain& initial_domain, double t0,
                         const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                         const SimOptions& options, bool keep_ticks, TraceWriter* trace) {
  if (options.dt <= 0.0 || options.control_period <= 0.0) {
    throw InvalidArgumentError("runWalk needs positive dt and control period");
  }
  if (q0.size() != model.numPositions() || qd0.size() != model.numPositions()) {
    throw InvalidArgumentError("runWalk state size does not match the model");
  }
  const int n_sub = std::max(1, static_cast<int>(std::lround(options.control_period / options.dt)));
  const double dt = options.control_period / n_sub;
  const int nq = model.numPositions();
  const int nu = model.numActuators();

  SimulationResult result;
  result.q_final = q0;
  result.qd_final = qd0;

  Cb5WalkingDomain domain = initial_domain;
  Eigen::VectorXd q = q0;
  Eigen::VectorXd qd = qd0;
  double t = t0;
  const double t_end = t0 + options.max_time;

  if (trace) trace->setColumns(traceColumns(nq, nu));

  int step_index = 0;
  double step_start_t = t;
  Eigen::Vector2d step_start_base = q.head<2>();
  StepScratch scratch;
  bool guard_armed = false;
  double eta_norm_sum = 0.0;

  auto abort_run = [&](const std::string& reason) {
    result.abort_reason = reason;
    result.completed = false;
    if (trace) trace->event("abort", {{"t", t}, {"reason", reason}});
  };

  try {
    policy.beginStep(domain, t, q, qd);
  } catch (const SolverError& err) {
    abort_run(std::string("controller: ") + err.what());
    result.t_final = t;
    return result;
  }

  bool aborted = false;
  while (!aborted) {
    if (t >= t_end - 1e-12) {
      result.completed = true;
      break;
    }
    if (options.max_steps > 0 && step_index >= options.max_steps) {
      result.completed = true;
      break;
    }

    // One control tick: freeze the torque, then integrate physics substeps.
    Eigen::VectorXd u;
    try {
      u = policy.torque(t, q, qd);
    } catch (const SolverError& err) {
      abort_run(std::string("controller: ") + err.what());
      break;
    }
    if (u.size() != nu) {
      throw InvalidArgumentError("policy torque size does not match the actuator count");
    }

    const TickInfo& info = policy.lastTick();
    const double eta_norm = info.eta.size() ? info.eta.lpNorm<Eigen::Infinity>() : 0.0;
    eta_norm_sum += eta_norm;
    ++result.tick_count;
    scratch.max_abs_eta = std::max(scratch.max_abs_eta, eta_norm);
    scratch.max_lyapunov = std::max(scratch.max_lyapunov, info.lyapunov);
    result.max_lyapunov = std::max(result.max_lyapunov, info.lyapunov);
    if (info.fallback) {
      ++scratch.fallback_ticks;
      if (trace) trace->event("fallback", {{"t", t}, {"step", step_index}});
    }

    // Plant-side reaction forces under the held torque.
    double normal_force = 0.0;
    double friction_margin = 0.0;
    try {
      const Eigen::VectorXd lambda_plant = constraintForces(model, q, qd, u, domain.constraints());
      ContactLimits limits;
      limits.friction_mu = model.parameters().friction_mu;
      const AdmissibilityReport report =
          contactAdmissibility(lambda_plant.head(2), WrenchLayout::kPointPlanar, limits);
      normal_force = lambda_plant(1);
      friction_margin = report.cone_margin;
      scratch.min_normal_force = std::min(scratch.min_normal_force, normal_force);
      scratch.min_friction_margin = std::min(scratch.min_friction_margin, friction_margin);
      if (!report.admissible) {
        AdmissibilityEvent event;
        event.t = t;
        event.step_index = step_index;
        event.time_since_impact = t - step_start_t;
        event.margin = report.worst;
        event.in_grace_window = event.time_since_impact <= options.impact_grace;
        result.admissibility_events.push_back(event);
        if (trace) {
          trace->event("admissibility", {{"t", t},
                                         {"step", step_index},
                                         {"margin", report.worst},
                                         {"since_impact", event.time_since_impact}});
        }
      }
    } catch (const SolverError&) {
      // Reaction forces are diagnostics; a singular plant KKT will surface
      // through the integrator immediately after.
    }

    if (keep_ticks) {
      TickSample sample;
      sample.t = t;
      sample.tau = info.tau;
      sample.step_index = step_index;
      sample.stance = domain.stance();
      sample.lyapunov = info.lyapunov;
      sample.eta_norm = eta_norm;
      sample.clf_margin = info.clf_margin;
      sample.normal_force = normal_force;
      sample.friction_margin = friction_margin;
      sample.solve_time = info.solve_time;
      sample.fallback = info.fallback;
      sample.u = u;
      result.ticks.push_back(std::move(sample));
    }
    if (trace) {
      std::vector<double> rowv;
      rowv.reserve(4 + 2 * nq + nu + 8);
      rowv.push_back(t);
      rowv.push_back(static_cast<double>(step_index));
      rowv.push_back(domain.stance() == Side::kRight ? 1.0 : 0.0);
      rowv.push_back(info.tau);
      for (int i = 0; i < nq; ++i) rowv.push_back(q(i));
      for (int i = 0; i < nq; ++i) rowv.push_back(qd(i));
      for (int i = 0; i < nu; ++i) rowv.push_back(u(i));
      rowv.insert(rowv.end(), {info.lyapunov, eta_norm, info.clf_margin, info.delta, normal_force,
                               friction_margin, info.solve_time, info.fallback ? 1.0 : 0.0});
      trace->row(rowv);
    }

    OdeRhs rhs = [&](double /*time*/, const Eigen::VectorXd& x) {
      const Eigen::VectorXd qx = x.head(nq);
      const Eigen::VectorXd qdx = x.tail(nq);
      const ConstrainedDynamics cd =
          constrainedForwardDynamics(model, qx, qdx, u, domain.constraints());
      Eigen::VectorXd dx(2 * nq);
      dx << qdx, cd.qdd;
      return dx;
    };

    Eigen::VectorXd x(2 * nq);
    x << q, qd;
    const double tick_start = t;
    bool impacted = false;

    for (int sub = 0; sub < n_sub && !impacted; ++sub) {
      const double t_a = tick_start + sub * dt;
      Eigen::VectorXd x_b;
      try {
        x_b = rk4Step(rhs, t_a, x, dt);
      } catch (const SolverError& err) {
        abort_run(std::string("integrator: ") + err.what());
        aborted = true;
        break;
      }

      const double g_b = domain.guardValue(x_b.head(nq));
      if (!guard_armed && g_b > Cb5WalkingDomain::kArmHeight) guard_armed = true;

      if (guard_armed && g_b <= 0.0 && domain.guardRate(x_b.head(nq), x_b.tail(nq)) < 0.0) {
        // Bracket [x, x_b]; bisect on the substep length.
        double lo = 0.0;
        double hi = dt;
        Eigen::VectorXd x_hit = x_b;
        while (hi - lo > options.guard_bisection_tol) {
          const double mid = 0.5 * (lo + hi);
          const Eigen::VectorXd x_mid = rk4Step(rhs, t_a, x, mid);
          if (domain.guardValue(x_mid.head(nq)) <= 0.0) {
            hi = mid;
            x_hit = x_mid;
          } else {
            lo = mid;
          }
        }
        const double t_imp = t_a + hi;
        q = x_hit.head(nq);
        qd = x_hit.tail(nq);
        t = t_imp;

        DomainTransition transition = stepTransition(domain, q, qd);

        StepRecord record;
        record.index = step_index;
        record.stance = domain.stance();
        record.t_start = step_start_t;
        record.t_end = t_imp;
        record.impact_speed = transition.impact_speed;
        const double span = std::max(t_imp - step_start_t, 1e-9);
        record.average_velocity = (q.head<2>() - step_start_base) / span;
        record.min_normal_force = scratch.min_normal_force;
        record.min_friction_margin = scratch.min_friction_margin;
        record.max_abs_eta = scratch.max_abs_eta;
        record.max_lyapunov = scratch.max_lyapunov;
        record.fallback_ticks = scratch.fallback_ticks;
        result.steps.push_back(record);

        if (trace) {
          trace->event("impact", {{"t", t_imp},
                                  {"step", step_index},
                                  {"impact_speed", transition.impact_speed},
                                  {"new_stance", sideName(transition.next.stance())}});
        }

        q = transition.impact.q_plus;
        qd = transition.impact.qd_plus;
        domain = transition.next;
        ++step_index;
        step_start_t = t_imp;
        step_start_base = q.head<2>();
        scratch.reset();
        guard_armed = false;
        impacted = true;

        try {
          policy.beginStep(domain, t, q, qd);
        } catch (const SolverError& err) {
          abort_run(std::string("controller: ") + err.what());
          aborted = true;
        }
        break;
      }

      x = x_b;
    }

    if (aborted) break;
    if (!impacted) {
      q = x.head(nq);
      qd = x.tail(nq);
      t = tick_start + options.control_period;
    }

    if (q(Cb5Model::kBaseZ) < options.min_base_height) {
      abort_run("fall");
      break;
    }
    if (qd.lpNorm<Eigen::Infinity>() > options.max_speed) {
      abort_run("divergence");
      break;
    }
  }

  result.t_final = t;
  result.q_final = q;
  result.qd_final = qd;
  result.mean_abs_eta = result.tick_count ? eta_norm_sum / result.tick_count : 0.0;
  if (trace) {
    trace->event("end", {{"t", t},
                         {"steps", static_cast<int>(result.steps.size())},
                         {"completed", result.completed},
                         {"reason", result.abort_reason}});
    trace->flush();
  }
  return result;
}

}  // namespace hzdclf
