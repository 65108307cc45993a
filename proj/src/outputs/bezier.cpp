#include "hzdclf/outputs/bezier.hpp"

#include <algorithm>
#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf {

namespace {

double clampPhase(double tau, bool* clamped) {
  const double out = std::clamp(tau, 0.0, 1.0);
  if (clamped != nullptr) *clamped = (out != tau);
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

void requireCurve(const BezierCurve& curve) {
  if (curve.coefficients.size() == 0) throw InvalidArgumentError("empty Bezier curve");
  if (!(curve.duration > 0.0)) throw InvalidArgumentError("Bezier duration must be positive");
  if (!curve.coefficients.allFinite()) throw InvalidArgumentError("Bezier coefficients not finite");
}

}  // namespace

Eigen::RowVectorXd bernsteinBasis(int degree, double tau) {
  Eigen::RowVectorXd basis(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    basis(k) = binomial(degree, k) * std::pow(tau, k) * std::pow(1.0 - tau, degree - k);
  }
  return basis;
}

Eigen::RowVectorXd bernsteinBasisDeriv(int degree, double tau) {
  // d/dtau b_{k,M} = M (b_{k-1,M-1} - b_{k,M-1}).
  const Eigen::RowVectorXd lower = bernsteinBasis(degree - 1, tau);
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    double v = 0.0;
    if (k >= 1) v += lower(k - 1);
    if (k <= degree - 1) v -= lower(k);
    out(k) = degree * v;
  }
  return out;
}

Eigen::RowVectorXd bernsteinBasisDeriv2(int degree, double tau) {
  const Eigen::RowVectorXd lower = bernsteinBasisDeriv(degree - 1, tau);
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    double v = 0.0;
    if (k >= 1) v += lower(k - 1);
    if (k <= degree - 1) v -= lower(k);
    out(k) = degree * v;
  }
  return out;
}

Eigen::VectorXd bezierEval(const BezierCurve& curve, double tau, bool* clamped) {
  requireCurve(curve);
  const double s = clampPhase(tau, clamped);
  return curve.coefficients * bernsteinBasis(curve.degree(), s).transpose();
}

Eigen::VectorXd bezierDeriv(const BezierCurve& curve, double tau, bool* clamped) {
  requireCurve(curve);
  const double s = clampPhase(tau, clamped);
  return curve.coefficients * bernsteinBasisDeriv(curve.degree(), s).transpose() / curve.duration;
}

Eigen::VectorXd bezierDeriv2(const BezierCurve& curve, double tau, bool* clamped) {
  requireCurve(curve);
  const double s = clampPhase(tau, clamped);
  return curve.coefficients * bernsteinBasisDeriv2(curve.degree(), s).transpose() /
         (curve.duration * curve.duration);
}

BezierFit bezierFit(const std::vector<double>& taus, const Eigen::MatrixXd& samples, int degree) {
  const int n = static_cast<int>(taus.size());
  if (degree < 1) throw InvalidArgumentError("Bezier fit degree must be at least 1");
  if (samples.cols() != n) throw InvalidArgumentError("one sample column per phase point required");
  if (n < degree + 1) throw InvalidArgumentError("Bezier fit needs at least degree + 1 samples");

  Eigen::MatrixXd basis(n, degree + 1);
  for (int i = 0; i < n; ++i) {
    if (taus[i] < 0.0 || taus[i] > 1.0) throw InvalidArgumentError("fit phases must lie in [0, 1]");
    basis.row(i) = bernsteinBasis(degree, taus[i]);
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (qr.rank() < degree + 1) {
    throw SolverError("Bezier fit phase points are degenerate (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(degree + 1) + ")");
  }

  BezierFit fit;
  fit.coefficients = qr.solve(samples.transpose()).transpose();
  fit.max_residual = (fit.coefficients * basis.transpose() - samples).cwiseAbs().maxCoeff();
  return fit;
}

PhasePoint phaseAt(double t, double t0, double duration) {
  if (!(duration > 0.0)) throw InvalidArgumentError("phase duration must be positive");
  PhasePoint p;
  const double raw = (t - t0) / duration;
  p.tau = std::clamp(raw, 0.0, 1.0);
  p.clamped = (p.tau != raw);
  p.rate = p.clamped ? 0.0 : 1.0 / duration;
  return p;
}

}  // namespace hzdclf
