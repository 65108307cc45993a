#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hzdclf {

// Vector-valued Bezier polynomial in a unit phase, one row per output. The
// duration converts phase derivatives into time derivatives.
struct BezierCurve {
  Eigen::MatrixXd coefficients;  // n_outputs x (degree + 1)
  double duration = 0.0;         // seconds spanned by tau in [0, 1]

  int rows() const { return static_cast<int>(coefficients.rows()); }
  int degree() const { return static_cast<int>(coefficients.cols()) - 1; }
};

// Clamped evaluation: tau outside [0, 1] is pulled to the nearest endpoint
// and reported through `clamped` when the caller wants to know.
Eigen::VectorXd bezierEval(const BezierCurve& curve, double tau, bool* clamped = nullptr);

// First and second TIME derivatives (phase derivatives scaled by 1/T and
// 1/T^2), evaluated at the clamped phase. Holding at an endpoint is the
// caller's business via the phase rate; these stay the polynomial's own
// derivatives so the endpoint identities are testable.
Eigen::VectorXd bezierDeriv(const BezierCurve& curve, double tau, bool* clamped = nullptr);
Eigen::VectorXd bezierDeriv2(const BezierCurve& curve, double tau, bool* clamped = nullptr);

// Bernstein basis row (b_0(tau), ..., b_degree(tau)) and its phase
// derivatives; shared by evaluation and fitting.
Eigen::RowVectorXd bernsteinBasis(int degree, double tau);
Eigen::RowVectorXd bernsteinBasisDeriv(int degree, double tau);
Eigen::RowVectorXd bernsteinBasisDeriv2(int degree, double tau);

struct BezierFit {
  Eigen::MatrixXd coefficients;  // n_outputs x (degree + 1)
  double max_residual = 0.0;     // worst per-sample fit error
};

// Least-squares regression of sample columns onto the Bernstein basis.
// `samples` carries one column per phase point. Throws InvalidArgumentError
// on a size mismatch or fewer than degree + 1 samples, SolverError when the
// phase points are too clustered for the basis matrix to have full rank.
BezierFit bezierFit(const std::vector<double>& taus, const Eigen::MatrixXd& samples, int degree = 6);

// Phase at time t for a step that began at t0: tau advances at 1/T inside
// the step and holds with zero rate once clamped.
struct PhasePoint {
  double tau = 0.0;
  double rate = 0.0;  // dtau/dt
  bool clamped = false;
};
PhasePoint phaseAt(double t, double t0, double duration);

}  // namespace hzdclf
