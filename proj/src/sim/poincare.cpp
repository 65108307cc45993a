#include "hzdclf/sim/poincare.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "hzdclf/errors.hpp"

namespace hzdclf {
namespace {

// Chart coordinate order; right stance, so stance leg = right, swing = left.
constexpr std::array<int, 6> kChartCoords = {
    Cb5Model::kTorsoPitch, Cb5Model::kRightHip, Cb5Model::kRightKnee,
    Cb5Model::kRightSpring, Cb5Model::kLeftHip, Cb5Model::kLeftKnee};

// Coordinates determined by the section: base from the pinned stance foot,
// the swing spring from its lock.
constexpr std::array<int, 3> kDependentCoords = {Cb5Model::kBaseX, Cb5Model::kBaseZ,
                                                 Cb5Model::kLeftSpring};

}  // namespace

Eigen::VectorXd poincareChart(const Cb5Model& model, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd) {
  if (q.size() != model.numPositions() || qd.size() != model.numPositions()) {
    throw InvalidArgumentError("poincareChart state size does not match the model");
  }
  Eigen::VectorXd chart(kPoincareDim);
  for (int i = 0; i < 6; ++i) {
    chart(i) = q(kChartCoords[i]);
    chart(6 + i) = qd(kChartCoords[i]);
  }
  return chart;
}

void poincareState(const Cb5Model& model, const Eigen::VectorXd& chart, Eigen::VectorXd* q,
                   Eigen::VectorXd* qd) {
  if (chart.size() != kPoincareDim) {
    throw InvalidArgumentError("poincareState expects a 12-entry chart point");
  }
  const int nq = model.numPositions();
  *q = Eigen::VectorXd::Zero(nq);
  for (int i = 0; i < 6; ++i) (*q)(kChartCoords[i]) = chart(i);

  // Marker positions are affine in the base, so pinning the stance foot at
  // the origin is one evaluation with the base zeroed.
  const Eigen::Vector2d foot = model.markerPosition(*q, Cb5Model::footMarker(Side::kRight));
  (*q)(Cb5Model::kBaseX) -= foot.x();
  (*q)(Cb5Model::kBaseZ) -= foot.y();

  // Velocities: free rates from the chart, the rest solve the domain's
  // velocity constraints J qd = 0.
  *qd = Eigen::VectorXd::Zero(nq);
  for (int i = 0; i < 6; ++i) (*qd)(kChartCoords[i]) = chart(6 + i);

  const Cb5WalkingDomain domain(model, Side::kRight, Eigen::Vector2d::Zero());
  const Eigen::MatrixXd jac = domain.constraints().jacobian(*q);
  Eigen::MatrixXd j_dep(jac.rows(), 3);
  for (int i = 0; i < 3; ++i) j_dep.col(i) = jac.col(kDependentCoords[i]);
  const Eigen::VectorXd rhs = -jac * (*qd);  // dependent columns are zero in qd so far
  Eigen::FullPivLU<Eigen::MatrixXd> lu(j_dep);
  if (!lu.isInvertible()) {
    throw SolverError("poincareState: section velocity constraints are degenerate");
  }
  const Eigen::Vector3d v_dep = lu.solve(rhs);
  for (int i = 0; i < 3; ++i) (*qd)(kDependentCoords[i]) = v_dep(i);
}

PoincareMap::PoincareMap(const Cb5Model& model, PolicyFactory factory, SimOptions options)
    : model_(&model), factory_(std::move(factory)), options_(std::move(options)) {
  options_.max_steps = 2;
}

Eigen::VectorXd PoincareMap::apply(const Eigen::VectorXd& chart) const {
  Eigen::VectorXd q, qd;
  poincareState(*model_, chart, &q, &qd);
  const Cb5WalkingDomain domain(*model_, Side::kRight, Eigen::Vector2d::Zero());
  auto policy = factory_();
  const SimulationResult run = runWalk(*model_, *policy, domain, 0.0, q, qd, options_);
  if (!run.completed || run.steps.size() < 2) {
    std::string reason = run.abort_reason.empty() ? "time limit" : run.abort_reason;
    throw SolverError("return map did not reach the section again (" + reason + ")");
  }
  return poincareChart(*model_, run.q_final, run.qd_final);
}

OrbitalStability orbitalStability(const PoincareMap& map, const Eigen::VectorXd& chart_point,
                                  double h) {
  if (h <= 0.0) throw InvalidArgumentError("orbitalStability needs a positive step");
  OrbitalStability out;
  const Eigen::VectorXd image = map.apply(chart_point);
  out.residual = (image - chart_point).lpNorm<Eigen::Infinity>();

  out.jacobian.resize(kPoincareDim, kPoincareDim);
  for (int i = 0; i < kPoincareDim; ++i) {
    Eigen::VectorXd plus = chart_point;
    Eigen::VectorXd minus = chart_point;
    plus(i) += h;
    minus(i) -= h;
    out.jacobian.col(i) = (map.apply(plus) - map.apply(minus)) / (2.0 * h);
  }

  const Eigen::EigenSolver<Eigen::MatrixXd> eig(out.jacobian);
  out.eigenvalues = eig.eigenvalues();
  out.spectral_radius = out.eigenvalues.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace hzdclf
