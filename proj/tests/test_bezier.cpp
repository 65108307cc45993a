#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "hzdclf/errors.hpp"
#include "hzdclf/outputs/bezier.hpp"
#include "test_util.hpp"

using namespace hzdclf;

namespace {

BezierCurve randomCurve(std::mt19937_64& gen, int rows, int degree, double duration) {
  return BezierCurve{test::randnMatrix(gen, rows, degree + 1), duration};
}

}  // namespace

TEST_CASE("bernstein basis partitions unity") {
  auto gen = test::rng(501);
  for (int trial = 0; trial < 20; ++trial) {
    const double tau = test::uniform(gen, 0.0, 1.0);
    for (int degree : {1, 3, 6}) {
      const Eigen::RowVectorXd b = bernsteinBasis(degree, tau);
      CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("bernstein derivatives match finite differences") {
  const double h = 1e-6;
  for (double tau : {0.12, 0.5, 0.83}) {
    for (int degree : {2, 6}) {
      const Eigen::RowVectorXd fd =
          (bernsteinBasis(degree, tau + h) - bernsteinBasis(degree, tau - h)) / (2.0 * h);
      CHECK((bernsteinBasisDeriv(degree, tau) - fd).cwiseAbs().maxCoeff() < 1e-6);

      const Eigen::RowVectorXd fd2 =
          (bernsteinBasisDeriv(degree, tau + h) - bernsteinBasisDeriv(degree, tau - h)) / (2.0 * h);
      CHECK((bernsteinBasisDeriv2(degree, tau) - fd2).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("curve endpoints reproduce the boundary coefficients") {
  auto gen = test::rng(502);
  const double T = 0.37;
  const BezierCurve curve = randomCurve(gen, 4, 6, T);
  const int M = curve.degree();

  CHECK((bezierEval(curve, 0.0) - curve.coefficients.col(0)).norm() < 1e-13);
  CHECK((bezierEval(curve, 1.0) - curve.coefficients.col(M)).norm() < 1e-13);

  const Eigen::VectorXd d0 = M / T * (curve.coefficients.col(1) - curve.coefficients.col(0));
  const Eigen::VectorXd d1 = M / T * (curve.coefficients.col(M) - curve.coefficients.col(M - 1));
  CHECK((bezierDeriv(curve, 0.0) - d0).norm() < 1e-11);
  CHECK((bezierDeriv(curve, 1.0) - d1).norm() < 1e-11);
}

TEST_CASE("time derivatives match finite differences in phase") {
  auto gen = test::rng(503);
  const double T = 0.52;
  const BezierCurve curve = randomCurve(gen, 3, 6, T);
  const double h = 1e-6;
  for (double tau : {0.2, 0.5, 0.9}) {
    const Eigen::VectorXd fd =
        (bezierEval(curve, tau + h) - bezierEval(curve, tau - h)) / (2.0 * h) / T;
    CHECK((bezierDeriv(curve, tau) - fd).cwiseAbs().maxCoeff() < 1e-6);

    const Eigen::VectorXd fd2 =
        (bezierDeriv(curve, tau + h) - bezierDeriv(curve, tau - h)) / (2.0 * h) / T;
    CHECK((bezierDeriv2(curve, tau) - fd2).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("evaluation clamps the phase and reports it") {
  auto gen = test::rng(504);
  const BezierCurve curve = randomCurve(gen, 2, 6, 0.4);

  bool clamped = false;
  const Eigen::VectorXd below = bezierEval(curve, -0.3, &clamped);
  CHECK(clamped);
  CHECK((below - bezierEval(curve, 0.0)).norm() == 0.0);

  const Eigen::VectorXd above = bezierEval(curve, 1.7, &clamped);
  CHECK(clamped);
  CHECK((above - bezierEval(curve, 1.0)).norm() == 0.0);

  // The derivative evaluators clamp the same way but stay the polynomial's
  // own derivative; holding the reference still is the phase clock's job.
  const Eigen::VectorXd d = bezierDeriv(curve, 1.7, &clamped);
  CHECK(clamped);
  CHECK((d - bezierDeriv(curve, 1.0)).norm() == 0.0);

  bezierEval(curve, 0.5, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("fit recovers the generating curve") {
  auto gen = test::rng(505);
  const BezierCurve truth = randomCurve(gen, 4, 6, 1.0);

  std::vector<double> taus;
  for (int i = 0; i < 25; ++i) taus.push_back(i / 24.0);
  Eigen::MatrixXd samples(4, 25);
  for (int i = 0; i < 25; ++i) samples.col(i) = bezierEval(truth, taus[i]);

  const BezierFit fit = bezierFit(taus, samples, 6);
  CHECK((fit.coefficients - truth.coefficients).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fit.max_residual < 1e-10);
}

TEST_CASE("degree-six fit reproduces a cubic exactly") {
  std::vector<double> taus;
  Eigen::MatrixXd samples(1, 30);
  for (int i = 0; i < 30; ++i) {
    const double tau = i / 29.0;
    taus.push_back(tau);
    samples(0, i) = 2.0 - tau + 3.0 * tau * tau - 0.5 * tau * tau * tau;
  }
  const BezierFit fit = bezierFit(taus, samples, 6);
  CHECK(fit.max_residual < 1e-10);

  // And the refit curve evaluates to the cubic off the sample grid too.
  const BezierCurve curve{fit.coefficients, 1.0};
  const double tau = 0.7321;
  const double expect = 2.0 - tau + 3.0 * tau * tau - 0.5 * tau * tau * tau;
  CHECK(bezierEval(curve, tau)(0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("fit rejects bad sample sets") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(1, 5);
  std::vector<double> taus = {0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK_THROWS_AS(bezierFit(taus, samples, 6), InvalidArgumentError);

  std::vector<double> repeated(7, 0.5);
  Eigen::MatrixXd repeated_samples = Eigen::MatrixXd::Zero(1, 7);
  CHECK_THROWS_AS(bezierFit(repeated, repeated_samples, 6), SolverError);

  std::vector<double> outside = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
  CHECK_THROWS_AS(bezierFit(outside, repeated_samples, 6), InvalidArgumentError);

  std::vector<double> mismatched = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(bezierFit(mismatched, repeated_samples, 6), InvalidArgumentError);
}

TEST_CASE("phase clock advances inside the step and holds outside") {
  const double t0 = 2.0;
  const double T = 0.4;

  const PhasePoint mid = phaseAt(t0 + 0.1, t0, T);
  CHECK(mid.tau == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mid.rate == doctest::Approx(1.0 / T).epsilon(1e-14));
  CHECK_FALSE(mid.clamped);

  const PhasePoint before = phaseAt(t0 - 0.05, t0, T);
  CHECK(before.tau == 0.0);
  CHECK(before.rate == 0.0);
  CHECK(before.clamped);

  const PhasePoint after = phaseAt(t0 + 0.6, t0, T);
  CHECK(after.tau == 1.0);
  CHECK(after.rate == 0.0);
  CHECK(after.clamped);

  CHECK_THROWS_AS(phaseAt(0.0, 0.0, 0.0), InvalidArgumentError);
}

TEST_CASE("bezier rejects malformed curves") {
  BezierCurve empty;
  CHECK_THROWS_AS(bezierEval(empty, 0.5), InvalidArgumentError);

  auto gen = test::rng(506);
  BezierCurve bad_duration = randomCurve(gen, 2, 6, 0.0);
  CHECK_THROWS_AS(bezierEval(bad_duration, 0.5), InvalidArgumentError);
}
