#include "hzdclf/numeric/qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hzdclf/errors.hpp"

namespace hzdclf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-sided internal row  a' x >= b.  Equalities keep their own list.
struct Row {
  Eigen::VectorXd a;
  double b = 0.0;
  enum class Source { kIneqLower, kIneqUpper, kBoundLower, kBoundUpper } source;
  int source_index = 0;
};

struct ActiveEntry {
  int row = -1;        // index into the one-sided row list, -1 for equalities
  int eq = -1;         // equality index, -1 for inequalities
  double eq_sign = 1;  // equalities are flipped so the initial residual is <= 0
};

double checkedInf(double v) { return std::isnan(v) ? kInf : v; }

}  // namespace

const char* qpStatusName(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIterations: return "max_iterations";
    case QpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

double QpSolution::kktResidual() const {
  return std::max(std::max(kkt_stationarity, kkt_feasibility),
                  std::max(kkt_dual, kkt_complementarity));
}

QpSolution QpSolver::solve(const QpProblem& problem,
                           const std::optional<Eigen::VectorXd>& warm_start) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = problem.numVariables();
  if (n <= 0) throw InvalidArgumentError("qp: empty problem");
  if (problem.hessian.rows() != n || problem.hessian.cols() != n)
    throw InvalidArgumentError("qp: hessian dimension mismatch");
  const int p = static_cast<int>(problem.eq_rhs.size());
  const int m = static_cast<int>(problem.ineq_lower.size());
  if (problem.eq_matrix.rows() != p || (p > 0 && problem.eq_matrix.cols() != n))
    throw InvalidArgumentError("qp: equality block dimension mismatch");
  if (problem.ineq_matrix.rows() != m || (m > 0 && problem.ineq_matrix.cols() != n))
    throw InvalidArgumentError("qp: inequality block dimension mismatch");
  if (problem.ineq_upper.size() != m)
    throw InvalidArgumentError("qp: inequality bound size mismatch");
  const bool has_bounds = problem.lb.size() > 0 || problem.ub.size() > 0;
  if (has_bounds && (problem.lb.size() != n || problem.ub.size() != n))
    throw InvalidArgumentError("qp: variable bound size mismatch");

  const double hnorm = problem.hessian.lpNorm<Eigen::Infinity>();
  if ((problem.hessian - problem.hessian.transpose()).lpNorm<Eigen::Infinity>() >
      1e-10 * (1.0 + hnorm))
    throw InvalidArgumentError("qp: hessian is not symmetric");

  QpSolution sol;
  Eigen::MatrixXd H = 0.5 * (problem.hessian + problem.hessian.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) {
    H.diagonal().array() += 1e-9;
    llt.compute(H);
    sol.regularized = true;
    if (llt.info() != Eigen::Success)
      throw InvalidArgumentError("qp: hessian is not positive definite");
  }

  // J = L^{-T}; columns beyond the active-set size span the free subspace.
  Eigen::MatrixXd J = llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd x = -llt.solve(problem.gradient);

  // Expand inequalities and bounds into one-sided rows with a stable order.
  std::vector<Row> rows;
  rows.reserve(2 * m + 2 * n);
  for (int i = 0; i < m; ++i) {
    const double lo = checkedInf(problem.ineq_lower(i));
    const double hi = checkedInf(problem.ineq_upper(i));
    if (lo > -kInf)
      rows.push_back({problem.ineq_matrix.row(i).transpose(), lo, Row::Source::kIneqLower, i});
    if (hi < kInf)
      rows.push_back({-problem.ineq_matrix.row(i).transpose(), -hi, Row::Source::kIneqUpper, i});
  }
  if (has_bounds) {
    for (int j = 0; j < n; ++j) {
      const double lo = checkedInf(problem.lb(j));
      const double hi = checkedInf(problem.ub(j));
      if (lo > -kInf) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        a(j) = 1.0;
        rows.push_back({a, lo, Row::Source::kBoundLower, j});
      }
      if (hi < kInf) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        a(j) = -1.0;
        rows.push_back({a, -hi, Row::Source::kBoundUpper, j});
      }
    }
  }
  const int n_rows = static_cast<int>(rows.size());

  // Degenerate zero-normal rows can never be activated; they are either
  // trivially satisfied or certify infeasibility.
  std::vector<bool> skip(n_rows, false);
  for (int i = 0; i < n_rows; ++i) {
    if (rows[i].a.lpNorm<Eigen::Infinity>() < 1e-14) {
      if (rows[i].b > options_.feasibility_tol) {
        sol.status = QpStatus::kInfeasible;
        return sol;
      }
      skip[i] = true;
    }
  }

  // Warm-start preference: rows active at the hint (or in the last solve).
  std::vector<bool> preferred(n_rows, false);
  if (warm_start && warm_start->size() == n) {
    for (int i = 0; i < n_rows; ++i)
      if (!skip[i] &&
          std::abs(rows[i].a.dot(*warm_start) - rows[i].b) <= 1e-8 * (1.0 + std::abs(rows[i].b)))
        preferred[i] = true;
  } else {
    for (int id : last_active_)
      if (id >= 0 && id < n_rows) preferred[id] = true;
  }

  std::vector<ActiveEntry> active;
  Eigen::VectorXd duals = Eigen::VectorXd::Zero(n);  // active-set duals, u >= 0 for rows
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  int iq = 0;
  int n_eq_active = 0;
  int iterations = 0;

  const auto finishTime = [&]() {
    sol.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  // Rotate component j of d into component j-1 and keep J consistent.
  const auto applyGivensAdd = [&](Eigen::VectorXd& d) {
    for (int j = n - 1; j > iq; --j) {
      const double a = d(j - 1), b = d(j);
      const double h = std::hypot(a, b);
      if (h <= 0.0) continue;
      const double c = a / h, s = b / h;
      d(j - 1) = h;
      d(j) = 0.0;
      const Eigen::VectorXd cj = J.col(j - 1);
      J.col(j - 1) = c * cj + s * J.col(j);
      J.col(j) = -s * cj + c * J.col(j).eval();
    }
  };

  const auto addConstraint = [&](const Eigen::VectorXd& d, const ActiveEntry& entry,
                                 double u_plus) {
    R.col(iq).head(iq + 1) = d.head(iq + 1);
    active.push_back(entry);
    duals(iq) = u_plus;
    ++iq;
  };

  const auto dropConstraint = [&](int k) {
    for (int i = k; i < iq - 1; ++i) {
      active[i] = active[i + 1];
      duals(i) = duals(i + 1);
      R.col(i) = R.col(i + 1);
    }
    active.pop_back();
    duals(iq - 1) = 0.0;
    R.col(iq - 1).setZero();
    --iq;
    for (int j = k; j < iq; ++j) {
      const double a = R(j, j), b = R(j + 1, j);
      const double h = std::hypot(a, b);
      if (std::abs(b) <= 1e-300) continue;
      const double c = a / h, s = b / h;
      for (int l = j; l < iq; ++l) {
        const double r1 = R(j, l), r2 = R(j + 1, l);
        R(j, l) = c * r1 + s * r2;
        R(j + 1, l) = -s * r1 + c * r2;
      }
      const Eigen::VectorXd cj = J.col(j);
      J.col(j) = c * cj + s * J.col(j + 1);
      J.col(j + 1) = -s * cj + c * J.col(j + 1).eval();
    }
  };

  // Try to add one constraint (np' x >= b0, residual s0 <= 0 on entry).
  // Returns +1 on success, 0 if the row is redundant-consistent, -1 on
  // infeasibility, -2 on iteration cap.
  const auto driveIn = [&](Eigen::VectorXd np, double b0, const ActiveEntry& entry) -> int {
    double s = np.dot(x) - b0;
    double u_plus = 0.0;
    while (true) {
      if (++iterations > options_.max_iterations) return -2;
      Eigen::VectorXd d = J.transpose() * np;
      Eigen::VectorXd r;
      if (iq > 0)
        r = R.topLeftCorner(iq, iq).triangularView<Eigen::Upper>().solve(d.head(iq));
      const double zTnp = d.tail(n - iq).squaredNorm();
      const double z_eps = 1e-22 * std::max(1.0, d.squaredNorm());

      double t1 = kInf;
      int k_drop = -1;
      for (int j = n_eq_active; j < iq; ++j) {
        if (r(j) > 1e-12) {
          const double cand = duals(j) / r(j);
          if (cand < t1) {
            t1 = cand;
            k_drop = j;
          }
        }
      }
      const double t2 = (zTnp > z_eps) ? -s / zTnp : kInf;
      const double t = std::min(t1, t2);

      if (t >= kInf) {
        if (std::abs(s) <= options_.feasibility_tol) return 0;  // redundant row
        return -1;
      }
      if (t2 >= kInf) {
        // Dual step: shift multipliers, drop the blocking constraint, retry.
        duals.head(iq) -= t * r;
        u_plus += t;
        dropConstraint(k_drop);
        continue;
      }
      x += t * (J.rightCols(n - iq) * d.tail(n - iq));
      if (iq > 0) duals.head(iq) -= t * r;
      u_plus += t;
      s = np.dot(x) - b0;
      if (t == t2) {
        Eigen::VectorXd dd = d;
        applyGivensAdd(dd);
        addConstraint(dd, entry, u_plus);
        return 1;
      }
      dropConstraint(k_drop);
    }
  };

  // Equalities first; they are never dropped and their duals may be negative.
  for (int e = 0; e < p; ++e) {
    Eigen::VectorXd np = problem.eq_matrix.row(e).transpose();
    double be = problem.eq_rhs(e);
    double sign = 1.0;
    if (np.dot(x) - be > 0) {
      np = -np;
      be = -be;
      sign = -1.0;
    }
    const int rc = driveIn(np, be, ActiveEntry{-1, e, sign});
    if (rc == -1) {
      sol.status = QpStatus::kInfeasible;
      sol.iterations = iterations;
      finishTime();
      return sol;
    }
    if (rc == -2) {
      sol.status = QpStatus::kMaxIterations;
      sol.iterations = iterations;
      finishTime();
      return sol;
    }
    if (rc == 1) ++n_eq_active;
  }

  // Main loop: activate the most violated one-sided row until none remain.
  while (true) {
    if (iterations > options_.max_iterations) {
      sol.status = QpStatus::kMaxIterations;
      sol.iterations = iterations;
      finishTime();
      return sol;
    }
    int pick = -1;
    std::vector<bool> is_active(n_rows, false);
    for (const auto& entry : active)
      if (entry.row >= 0) is_active[entry.row] = true;
    // Warm-started rows first, most violated within each pass; ties go to
    // the lowest index so reruns are deterministic.
    for (int pass = 0; pass < 2 && pick < 0; ++pass) {
      double worst = -options_.feasibility_tol;
      for (int i = 0; i < n_rows; ++i) {
        if (skip[i] || is_active[i] || (pass == 0 && !preferred[i])) continue;
        const double s = rows[i].a.dot(x) - rows[i].b;
        if (s < worst) {
          pick = i;
          worst = s;
        }
      }
    }
    if (pick < 0) break;  // feasible and optimal

    const int rc = driveIn(rows[pick].a, rows[pick].b, ActiveEntry{pick, -1, 1.0});
    if (rc == -1) {
      sol.status = QpStatus::kInfeasible;
      sol.iterations = iterations;
      finishTime();
      return sol;
    }
    if (rc == -2) {
      sol.status = QpStatus::kMaxIterations;
      sol.iterations = iterations;
      finishTime();
      return sol;
    }
  }

  // Map internal duals back to the caller's sign convention:
  //   H x + g + A_eq' y_eq + A_ineq' y_ineq + y_bounds = 0.
  sol.x = x;
  sol.dual_eq = Eigen::VectorXd::Zero(p);
  sol.dual_ineq = Eigen::VectorXd::Zero(m);
  sol.dual_bounds = Eigen::VectorXd::Zero(has_bounds ? n : 0);
  last_active_.clear();
  for (int j = 0; j < iq; ++j) {
    const ActiveEntry& entry = active[j];
    const double u = duals(j);
    if (entry.eq >= 0) {
      sol.dual_eq(entry.eq) = -entry.eq_sign * u;
      continue;
    }
    last_active_.push_back(entry.row);
    const Row& row = rows[entry.row];
    switch (row.source) {
      case Row::Source::kIneqLower: sol.dual_ineq(row.source_index) = -u; break;
      case Row::Source::kIneqUpper: sol.dual_ineq(row.source_index) = u; break;
      case Row::Source::kBoundLower: sol.dual_bounds(row.source_index) = -u; break;
      case Row::Source::kBoundUpper: sol.dual_bounds(row.source_index) = u; break;
    }
  }

  sol.objective = 0.5 * x.dot(problem.hessian * x) + problem.gradient.dot(x);
  sol.iterations = iterations;

  // KKT residuals.
  Eigen::VectorXd stat = problem.hessian * x + problem.gradient;
  if (p > 0) stat += problem.eq_matrix.transpose() * sol.dual_eq;
  if (m > 0) stat += problem.ineq_matrix.transpose() * sol.dual_ineq;
  if (has_bounds) stat += sol.dual_bounds;
  sol.kkt_stationarity = stat.lpNorm<Eigen::Infinity>();

  double feas = 0.0, dual_viol = 0.0, comp = 0.0;
  if (p > 0)
    feas = (problem.eq_matrix * x - problem.eq_rhs).lpNorm<Eigen::Infinity>();
  const auto scanRow = [&](double value, double lo, double hi, double y) {
    feas = std::max(feas, std::max(value - hi, lo - value));
    if (y > 0) {
      if (hi >= kInf) dual_viol = std::max(dual_viol, y);
      else comp = std::max(comp, y * std::abs(hi - value));
    } else if (y < 0) {
      if (lo <= -kInf) dual_viol = std::max(dual_viol, -y);
      else comp = std::max(comp, -y * std::abs(value - lo));
    }
  };
  for (int i = 0; i < m; ++i)
    scanRow(problem.ineq_matrix.row(i).dot(x), checkedInf(problem.ineq_lower(i)),
            checkedInf(problem.ineq_upper(i)), sol.dual_ineq(i));
  if (has_bounds)
    for (int j = 0; j < n; ++j)
      scanRow(x(j), checkedInf(problem.lb(j)), checkedInf(problem.ub(j)), sol.dual_bounds(j));
  sol.kkt_feasibility = std::max(feas, 0.0);
  sol.kkt_dual = dual_viol;
  sol.kkt_complementarity = comp;

  sol.status = QpStatus::kOptimal;
  finishTime();
  return sol;
}

}  // namespace hzdclf
