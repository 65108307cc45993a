#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hzdclf/control/regulators.hpp"
#include "hzdclf/errors.hpp"
#include "hzdclf/models/cb5.hpp"
#include "hzdclf/outputs/bezier.hpp"
#include "test_util.hpp"

namespace hzdclf {

TEST_CASE("blended velocity switches on once a step average exists") {
  RegulatorState state;
  const Eigen::Vector2d v_act(0.7, 0.1);
  const Eigen::Vector2d v_nom(0.5, 0.0);

  CHECK((blendedVelocity(state, v_act, v_nom) - v_act).norm() == 0.0);

  state.has_history = true;
  state.vbar_prev = Eigen::Vector2d(0.55, 0.02);
  const Eigen::Vector2d expected = state.vbar_prev + (v_act - v_nom);
  CHECK((blendedVelocity(state, v_act, v_nom) - expected).norm() == 0.0);
}

TEST_CASE("velocity error integral leaks and clamps per component") {
  RegulatorGains gains;
  gains.kfs_i = Eigen::Vector2d(0.06, 0.0);
  gains.integrator_leak = 0.9999;
  gains.integrator_clamp = 0.3;

  RegulatorState state;
  state.integral = Eigen::Vector2d(0.1, -0.2);
  const Eigen::Vector2d v_tilde(1.0, 2.0);
  const Eigen::Vector2d v_des(0.4, -1.0);

  RegulatorState expected = state;
  integrateVelocityError(state, gains, v_tilde, v_des, 0.01);
  const Eigen::Vector2d raw =
      0.9999 * expected.integral + 0.01 * (v_tilde - v_des);
  CHECK(state.integral(0) == doctest::Approx(raw(0)).epsilon(1e-15));
  CHECK(state.integral(1) == doctest::Approx(raw(1)).epsilon(1e-15));

  // Push component 0 into the clamp; component 1 has zero gain and runs free.
  for (int i = 0; i < 20000; ++i) {
    integrateVelocityError(state, gains, v_tilde, v_des, 0.01);
  }
  const double bound = gains.integrator_clamp / 0.06;
  CHECK(state.integral(0) == doctest::Approx(bound).epsilon(1e-12));
  CHECK(std::abs(state.integral(1)) > bound);

  CHECK_THROWS_AS(integrateVelocityError(state, gains, v_tilde, v_des, -0.01),
                  InvalidArgumentError);
}

TEST_CASE("velocity regulator and footstrike offset follow their gain maps") {
  auto gen = test::rng(561);
  RegulatorGains gains;
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Vector2d p_err = test::randnVector(gen, 2);
    const Eigen::Vector2d v_tilde = test::randnVector(gen, 2);
    const Eigen::Vector2d v_des = test::randnVector(gen, 2);

    const Eigen::Vector2d accel = velocityRegulatorAccel(gains, p_err, v_tilde, v_des);
    const Eigen::Vector2d accel_expected =
        gains.k_qdd_p.cwiseProduct(p_err) + gains.k_v.cwiseProduct(v_tilde - v_des);
    CHECK((accel - accel_expected).norm() == 0.0);

    RegulatorState fresh;
    fresh.integral = test::randnVector(gen, 2);
    const Eigen::Vector2d cold = footstrikeOffset(fresh, gains, v_tilde, v_des);
    const Eigen::Vector2d cold_expected = gains.kfs_p.cwiseProduct(v_tilde - v_des) +
                                          gains.kfs_i.cwiseProduct(fresh.integral);
    CHECK((cold - cold_expected).norm() == 0.0);

    fresh.has_history = true;
    fresh.vbar_prev = test::randnVector(gen, 2);
    const Eigen::Vector2d warm = footstrikeOffset(fresh, gains, v_tilde, v_des);
    const Eigen::Vector2d warm_expected =
        cold_expected + gains.kfs_d.cwiseProduct(v_tilde - fresh.vbar_prev);
    CHECK((warm - warm_expected).norm() < 1e-15);
  }
}

TEST_CASE("force regulator splits its feedforward by support progression") {
  RegulatorGains gains;
  const double y = 0.01;
  const double ydot = -0.05;
  const double vx_des = 0.8;
  const double vx_bar = 0.6;

  const double pd_part = -gains.k_force_p * y - gains.k_force_d * ydot;

  // Base behind the stance foot: the (k1, k2) pair applies.
  const double behind = forceRegulatorDelta(gains, y, ydot, -0.1, vx_des, vx_bar);
  const double s_behind = -0.1 / gains.force_x0;
  const double behind_expected =
      pd_part +
      (gains.k_force_v(0) * vx_des + gains.k_force_v(1) * (vx_des - vx_bar)) * s_behind;
  CHECK(behind == doctest::Approx(behind_expected).epsilon(1e-15));

  // Base past the stance foot: the (k3, k4) pair applies.
  const double ahead = forceRegulatorDelta(gains, y, ydot, 0.15, vx_des, vx_bar);
  const double s_ahead = 0.15 / gains.force_x0;
  const double ahead_expected =
      pd_part +
      (gains.k_force_v(2) * vx_des + gains.k_force_v(3) * (vx_des - vx_bar)) * s_ahead;
  CHECK(ahead == doctest::Approx(ahead_expected).epsilon(1e-15));

  // Zero progression keeps only the PD part.
  CHECK(forceRegulatorDelta(gains, y, ydot, 0.0, vx_des, vx_bar) ==
        doctest::Approx(pd_part).epsilon(1e-15));

  // A degenerate normalization length falls back to one.
  RegulatorGains flat = gains;
  flat.force_x0 = 0.0;
  const double fallback = forceRegulatorDelta(flat, y, ydot, 0.15, vx_des, vx_bar);
  const double fallback_expected =
      pd_part + (gains.k_force_v(2) * vx_des + gains.k_force_v(3) * (vx_des - vx_bar)) * 0.15;
  CHECK(fallback == doctest::Approx(fallback_expected).epsilon(1e-15));
}

TEST_CASE("stance force direction points from the foot toward the hip") {
  const Cb5Model model;
  auto gen = test::rng(562);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd q = model.symmetricPose(0.3 + 0.2 * test::uniform(gen, 0.0, 1.0));
    q += 0.15 * test::randnVector(gen, 9);
    // The direction is the neutral leg axis: exact with the shin spring at
    // rest, an approximation once it deflects.
    q(Cb5Model::kLeftSpring) = 0.0;
    q(Cb5Model::kRightSpring) = 0.0;
    for (Side stance : {Side::kLeft, Side::kRight}) {
      const Eigen::Vector2d dir = stanceForceDirection(model, q, stance);
      CHECK(dir.norm() == doctest::Approx(1.0).epsilon(1e-12));
      const Eigen::Vector2d foot =
          model.markerPosition(q, Cb5Model::footMarker(stance));
      const Eigen::Vector2d hip = q.head<2>();
      CHECK((dir - (hip - foot).normalized()).norm() < 1e-9);
    }
  }
}

TEST_CASE("footstrike retargeting shifts the landing point and keeps terminal rates") {
  auto gen = test::rng(563);
  for (int trial = 0; trial < 10; ++trial) {
    BezierCurve nominal;
    nominal.coefficients = 0.05 * test::randnMatrix(gen, 4, 7);
    nominal.duration = 0.4;
    // Terminal swing geometry: leg of sensible length, foot below the hip.
    nominal.coefficients(2, 6) = 0.7 + 0.05 * test::randn(gen);
    nominal.coefficients(3, 6) = 0.3 * test::randn(gen);

    const double delta_x = 0.08 * test::randn(gen);
    const BezierCurve shifted = retargetSwingFootstrike(nominal, delta_x);

    // Torso and stance rows untouched, terminal rates of every row preserved.
    CHECK((shifted.coefficients.topRows(2) - nominal.coefficients.topRows(2)).norm() == 0.0);
    CHECK((bezierDeriv(shifted, 1.0) - bezierDeriv(nominal, 1.0)).cwiseAbs().maxCoeff() <
          1e-12);

    // The terminal foot position moves by exactly delta_x, staying level.
    const auto foot = [](const BezierCurve& c) {
      const Eigen::VectorXd y = bezierEval(c, 1.0);
      return Eigen::Vector2d(y(2) * std::sin(y(3)), -y(2) * std::cos(y(3)));
    };
    const Eigen::Vector2d p0 = foot(nominal);
    const Eigen::Vector2d p1 = foot(shifted);
    CHECK(std::abs((p1.x() - p0.x()) - delta_x) < 1e-12);
    CHECK(std::abs(p1.y() - p0.y()) < 1e-12);
  }

  BezierCurve bad;
  bad.coefficients = Eigen::MatrixXd::Zero(3, 7);
  bad.duration = 0.4;
  CHECK_THROWS_AS(retargetSwingFootstrike(bad, 0.05), InvalidArgumentError);
}

TEST_CASE("regulator gains survive a json round trip") {
  auto gen = test::rng(564);
  RegulatorGains gains;
  gains.k_qdd_p = test::randnVector(gen, 2);
  gains.k_v = test::randnVector(gen, 2);
  gains.kfs_p = test::randnVector(gen, 2);
  gains.kfs_d = test::randnVector(gen, 2);
  gains.kfs_i = test::randnVector(gen, 2);
  gains.integrator_leak = 0.123456789;
  gains.integrator_clamp = 0.987654321;
  gains.k_force_p = 1234.5;
  gains.k_force_d = 67.8;
  gains.k_force_v = test::randnVector(gen, 4);
  gains.force_x0 = 0.42;

  const nlohmann::json j = regulatorGainsToJson(gains);
  const RegulatorGains back = regulatorGainsFromJson(j, "test");

  CHECK((back.k_qdd_p - gains.k_qdd_p).norm() == 0.0);
  CHECK((back.k_v - gains.k_v).norm() == 0.0);
  CHECK((back.kfs_p - gains.kfs_p).norm() == 0.0);
  CHECK((back.kfs_d - gains.kfs_d).norm() == 0.0);
  CHECK((back.kfs_i - gains.kfs_i).norm() == 0.0);
  CHECK(back.integrator_leak == gains.integrator_leak);
  CHECK(back.integrator_clamp == gains.integrator_clamp);
  CHECK(back.k_force_p == gains.k_force_p);
  CHECK(back.k_force_d == gains.k_force_d);
  CHECK((back.k_force_v - gains.k_force_v).norm() == 0.0);
  CHECK(back.force_x0 == gains.force_x0);

  nlohmann::json extra = j;
  extra["surprise"] = 1.0;
  CHECK_THROWS_AS(regulatorGainsFromJson(extra, "test"), ConfigError);

  nlohmann::json missing = j;
  missing.erase("k_force_p");
  CHECK_THROWS_AS(regulatorGainsFromJson(missing, "test"), ConfigError);
}

}  // namespace hzdclf
