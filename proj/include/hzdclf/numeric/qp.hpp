#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <vector>

namespace hzdclf {

// Dense strictly convex quadratic program
//
//   minimize    0.5 x' H x + g' x
//   subject to  A_eq x  = b_eq
//               lb_ineq <= A_ineq x <= ub_ineq
//               lb      <= x        <= ub
//
// H must be symmetric positive definite (a single regularization attempt of
// +1e-9 I is made if the Cholesky factorization fails; if it still fails the
// problem is rejected). Infinite entries in lb/ub/lb_ineq/ub_ineq disable the
// corresponding side.
//
// Tolerances are absolute and assume the problem is sensibly scaled
// (||H||_inf roughly within [1, 1e4]); scaling is the caller's duty.
struct QpProblem {
  Eigen::MatrixXd hessian;          // n x n
  Eigen::VectorXd gradient;         // n
  Eigen::MatrixXd eq_matrix;        // p x n (may be 0 x n)
  Eigen::VectorXd eq_rhs;           // p
  Eigen::MatrixXd ineq_matrix;      // m x n (may be 0 x n)
  Eigen::VectorXd ineq_lower;       // m  (-inf allowed)
  Eigen::VectorXd ineq_upper;       // m  (+inf allowed)
  Eigen::VectorXd lb;               // n or empty (-inf allowed)
  Eigen::VectorXd ub;               // n or empty (+inf allowed)

  int numVariables() const { return static_cast<int>(gradient.size()); }
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations, kUnbounded };

const char* qpStatusName(QpStatus status);

inline std::ostream& operator<<(std::ostream& os, QpStatus status) {
  return os << qpStatusName(status);
}

// Multiplier conventions: stationarity holds as
//   H x + g + A_eq' y_eq + A_ineq' y_ineq + y_bounds = 0
// with y >= 0 on rows whose upper side is active and y <= 0 on rows whose
// lower side is active (equality multipliers are unrestricted). With this
// convention the multiplier of a one-sided row a'x <= b is the classic
// nonnegative KKT multiplier of f + y (a'x - b).
struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_ineq;
  Eigen::VectorXd dual_bounds;
  double objective = 0.0;
  int iterations = 0;
  double solve_time = 0.0;          // seconds
  bool regularized = false;         // true if the +1e-9 I fallback was used

  // Worst absolute KKT residuals, filled in by the solver on success:
  // stationarity, primal feasibility, dual sign, complementarity.
  double kkt_stationarity = 0.0;
  double kkt_feasibility = 0.0;
  double kkt_dual = 0.0;
  double kkt_complementarity = 0.0;
  double kktResidual() const;
};

// Dual active-set solver. An instance remembers the active set of its last
// solve and uses it (or a caller-provided guess) to bias which constraint is
// activated first, which is what makes consecutive control-loop solves on
// slowly varying problems cheap. Solving is deterministic: identical inputs
// produce bit-identical outputs.
class QpSolver {
 public:
  struct Options {
    int max_iterations = 200;
    double feasibility_tol = 1e-10;  // activation threshold on raw row residuals
  };

  QpSolver() = default;
  explicit QpSolver(const Options& options) : options_(options) {}

  // warm_start, if given, is a point whose nearly-active constraints seed
  // the activation order (the iterate itself always starts at the
  // unconstrained optimum, as the dual method requires).
  QpSolution solve(const QpProblem& problem,
                   const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

  void resetWarmStart() { last_active_.clear(); }

 private:
  Options options_;
  std::vector<int> last_active_;  // internal one-sided row ids from the last solve
};

}  // namespace hzdclf
