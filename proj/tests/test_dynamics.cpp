#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hzdclf/dynamics/contact.hpp"
#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/errors.hpp"
#include "hzdclf/models/cb5.hpp"
#include "hzdclf/numeric/linalg.hpp"
#include "test_util.hpp"

using namespace hzdclf;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

double maxAbs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

VectorXd randomCb5Position(std::mt19937_64& gen) {
  VectorXd q(9);
  q << test::uniform(gen, -0.5, 0.5), test::uniform(gen, 0.6, 0.9),
      test::uniform(gen, -0.3, 0.3), test::uniform(gen, -0.6, 0.6),
      test::uniform(gen, 0.3, 1.1), test::uniform(gen, -0.06, 0.06),
      test::uniform(gen, -0.6, 0.6), test::uniform(gen, 0.3, 1.1),
      test::uniform(gen, -0.06, 0.06);
  return q;
}

// Left-foot contact plus both spring locks, the single-stance arrangement.
ConstraintSet stanceSet(const Cb5Model& cb5, const VectorXd& q) {
  ConstraintSet set;
  set.add(cb5.contactConstraint("foot_left", cb5.markerPosition(q, "foot_left")));
  set.add(cb5.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, q(Cb5Model::kLeftSpring)));
  set.add(cb5.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring,
                                  q(Cb5Model::kRightSpring)));
  return set;
}

}  // namespace

TEST_SUITE("constrained_dynamics") {

TEST_CASE("double-support statics: feet carry exactly the robot weight") {
  const Cb5Model cb5;
  VectorXd q = cb5.symmetricPose(0.7);
  q(Cb5Model::kLeftHip) -= 0.25;
  q(Cb5Model::kRightHip) += 0.3;
  q(Cb5Model::kLeftSpring) = 0.02;
  q(Cb5Model::kRightSpring) = -0.01;
  const VectorXd qd = VectorXd::Zero(9);

  ConstraintSet set;
  set.add(cb5.contactConstraint("foot_left", cb5.markerPosition(q, "foot_left")));
  set.add(cb5.contactConstraint("foot_right", cb5.markerPosition(q, "foot_right")));
  set.add(cb5.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, q(Cb5Model::kLeftSpring)));
  set.add(cb5.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring,
                                  q(Cb5Model::kRightSpring)));

  // Inverse statics: find (u, lambda) with B u + J' lambda = H(q, 0).
  const MatrixXd j = set.jacobian(q);
  MatrixXd a(9, 4 + set.totalDim());
  a.leftCols(4) = cb5.actuationMatrix();
  a.rightCols(set.totalDim()) = j.transpose();
  const VectorXd h = cb5.biasForces(q, qd);
  const VectorXd sol = a.colPivHouseholderQr().solve(h);
  REQUIRE(maxAbs(a * sol - h) <= 1e-9);

  const VectorXd u = sol.head(4);
  const auto dyn = constrainedForwardDynamics(cb5, q, qd, u, set);
  CHECK(maxAbs(dyn.qdd) <= 1e-8);
  CHECK(maxAbs(dyn.lambda - sol.tail(set.totalDim())) <= 1e-8);

  const double weight = cb5.totalMass() * cb5.parameters().gravity;
  CHECK(dyn.lambda(1) + dyn.lambda(3) == doctest::Approx(weight).epsilon(1e-10));
  CHECK(dyn.lambda(0) + dyn.lambda(2) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("multipliers from the closed form match the KKT solve") {
  const Cb5Model cb5;
  auto gen = test::rng(411);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd q = randomCb5Position(gen);
    const VectorXd qd = test::randnVector(gen, 9);
    const VectorXd u = 5.0 * test::randnVector(gen, 4);
    const ConstraintSet set = stanceSet(cb5, q);

    const auto dyn = constrainedForwardDynamics(cb5, q, qd, u, set);
    const VectorXd lambda = constraintForces(cb5, q, qd, u, set);
    CHECK(maxAbs(dyn.lambda - lambda) <= 1e-9 * (1.0 + maxAbs(lambda)));

    // The acceleration satisfies the constraint and the equations of motion.
    CHECK(maxAbs(set.jacobian(q) * dyn.qdd + set.jdotQdot(q, qd)) <= 1e-8);
    const VectorXd residual = cb5.massMatrix(q) * dyn.qdd + cb5.biasForces(q, qd) -
                              cb5.actuationMatrix() * u -
                              set.jacobian(q).transpose() * dyn.lambda;
    CHECK(maxAbs(residual) <= 1e-8);
  }
}

TEST_CASE("unconstrained dynamics fall freely") {
  const Cb5Model cb5;
  const VectorXd q = cb5.symmetricPose(0.7);
  const VectorXd qd = VectorXd::Zero(9);
  const auto dyn = constrainedForwardDynamics(cb5, q, qd, VectorXd::Zero(4), ConstraintSet());
  CHECK(dyn.lambda.size() == 0);
  // Vertical center-of-mass acceleration is -g in free fall.
  const double mg = cb5.totalMass() * cb5.parameters().gravity;
  VectorXd gen_gravity = cb5.gravityForces(q);
  CHECK(gen_gravity(1) == doctest::Approx(mg).epsilon(1e-12));
  CHECK(dyn.qdd(1) < 0.0);
}

TEST_CASE("projected dynamics agree with the multiplier form") {
  const Cb5Model cb5;
  auto gen = test::rng(412);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd q = randomCb5Position(gen);
    const VectorXd qd = test::randnVector(gen, 9);
    const VectorXd u = 5.0 * test::randnVector(gen, 4);

    ConstraintSet hard;
    hard.add(cb5.contactConstraint("foot_left", cb5.markerPosition(q, "foot_left")));
    hard.add(cb5.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring,
                                     q(Cb5Model::kRightSpring)));
    ConstraintSet soft;
    soft.add(cb5.contactConstraint("foot_right", cb5.markerPosition(q, "foot_right")));

    ConstraintSet all;
    for (const auto& c : hard.entries()) all.add(c);
    for (const auto& c : soft.entries()) all.add(c);

    const auto dyn = constrainedForwardDynamics(cb5, q, qd, u, all);
    const VectorXd lambda_soft = dyn.lambda.tail(soft.totalDim());

    const auto proj = projectDynamics(cb5, q, qd, hard, soft);

    // The KKT solution satisfies the projected equations of motion.
    const VectorXd residual = proj.mass * dyn.qdd + proj.bias - proj.actuation * u -
                              proj.soft_jacobian_t * lambda_soft;
    CHECK(maxAbs(residual) <= 1e-7);

    // And the projected mass matrix is invertible, recovering the same qdd.
    Eigen::FullPivLU<MatrixXd> lu(proj.mass);
    REQUIRE(lu.isInvertible());
    const VectorXd qdd_proj =
        lu.solve(proj.actuation * u + proj.soft_jacobian_t * lambda_soft - proj.bias);
    CHECK(maxAbs(qdd_proj - dyn.qdd) <= 1e-7);

    // Projector sanity: symmetric, idempotent, rank n - m_hard.
    CHECK(maxAbs(proj.projector - proj.projector.transpose()) <= 1e-10);
    CHECK(maxAbs(proj.projector * proj.projector - proj.projector) <= 1e-10);
    CHECK(proj.projector.trace() == doctest::Approx(9.0 - hard.totalDim()).epsilon(1e-9));
    CHECK(maxAbs(hard.jacobian(q) * proj.projector) <= 1e-9);
  }
}

TEST_CASE("constraint drift stays small over one second of passive swing") {
  const Cb5Model cb5;
  VectorXd q0 = cb5.symmetricPose(0.7);
  auto gen = test::rng(413);
  VectorXd qd0 = 0.1 * test::randnVector(gen, 9);

  const ConstraintSet set = stanceSet(cb5, q0);
  const VectorXd u = VectorXd::Zero(4);

  // Start on the constraint manifold: project the velocity onto the tangent.
  const MatrixXd j0 = set.jacobian(q0);
  qd0 -= pseudoInverse(j0) * (j0 * qd0);
  REQUIRE(maxAbs(j0 * qd0) <= 1e-12);

  const auto make_deriv = [&](const std::optional<BaumgarteParams>& stab) {
    return [&cb5, &set, &u, stab](const VectorXd& x) -> VectorXd {
      VectorXd out(18);
      out.head(9) = x.tail(9);
      out.tail(9) = constrainedForwardDynamics(cb5, x.head(9), x.tail(9), u, set, stab).qdd;
      return out;
    };
  };

  SUBCASE("no stabilization") {
    VectorXd x(18);
    x << q0, qd0;
    const auto deriv = make_deriv(std::nullopt);
    double worst = 0.0;
    for (int step = 0; step < 10000; ++step) {
      x = test::rk4Step(deriv, x, 1e-4);
      if (step % 100 == 0) worst = std::max(worst, maxAbs(set.value(x.head(9))));
    }
    CHECK(worst <= 1e-8);
  }

  SUBCASE("a deliberate violation decays under stabilization") {
    ConstraintSet shifted;
    shifted.add(cb5.contactConstraint(
        "foot_left", cb5.markerPosition(q0, "foot_left") + Vector2d(0.0, 1e-3)));
    shifted.add(cb5.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, 0.0));
    shifted.add(cb5.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring, 0.0));

    const BaumgarteParams stab;  // sigma = 20
    const auto deriv = [&](const VectorXd& x) -> VectorXd {
      VectorXd out(18);
      out.head(9) = x.tail(9);
      out.tail(9) = constrainedForwardDynamics(cb5, x.head(9), x.tail(9), u, shifted, stab).qdd;
      return out;
    };
    VectorXd x(18);
    x << q0, qd0;
    REQUIRE(maxAbs(shifted.value(q0)) >= 1e-4);
    for (int step = 0; step < 10000; ++step) x = test::rk4Step(deriv, x, 1e-4);
    CHECK(maxAbs(shifted.value(x.head(9))) <= 1e-9);
  }
}

TEST_CASE("rank-deficient constraint sets name the offender") {
  const Cb5Model cb5;
  const VectorXd q = cb5.symmetricPose(0.7);
  const VectorXd qd = VectorXd::Zero(9);

  ConstraintSet dup;
  dup.add(cb5.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, 0.0));
  dup.add(cb5.jointLockConstraint("spring_lock_left_again", Cb5Model::kLeftSpring, 0.0));

  bool thrown = false;
  try {
    constrainedForwardDynamics(cb5, q, qd, VectorXd::Zero(4), dup);
  } catch (const DegenerateConstraintError& e) {
    thrown = true;
    CHECK(e.constraint().find("spring_lock_left_again") != std::string::npos);
  }
  CHECK(thrown);

  CHECK_THROWS_AS(constraintForces(cb5, q, qd, VectorXd::Zero(4), dup), DegenerateConstraintError);
  CHECK_THROWS_AS(impactMap(cb5, q, qd, dup), DegenerateConstraintError);
  CHECK_THROWS_AS(projectDynamics(cb5, q, qd, dup), DegenerateConstraintError);
}

TEST_CASE("mass matrix is symmetric positive definite across configuration space") {
  const Cb5Model cb5;
  auto gen = test::rng(414);
  double min_eig = 1e30;
  double worst_asym = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const VectorXd q = 1.5 * test::randnVector(gen, 9);
    const MatrixXd d = cb5.massMatrix(q);
    worst_asym = std::max(worst_asym, maxAbs(d - d.transpose()));
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(d);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  CHECK(worst_asym <= 1e-12);
  CHECK(min_eig > 1e-6);
}

TEST_CASE("argument validation") {
  const Cb5Model cb5;
  const VectorXd q = cb5.symmetricPose(0.7);
  CHECK_THROWS_AS(
      constrainedForwardDynamics(cb5, q, VectorXd::Zero(8), VectorXd::Zero(4), ConstraintSet()),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      constrainedForwardDynamics(cb5, q, VectorXd::Zero(9), VectorXd::Zero(3), ConstraintSet()),
      InvalidArgumentError);
  CHECK_THROWS_AS(projectDynamics(cb5, q, VectorXd::Zero(9), ConstraintSet()),
                  InvalidArgumentError);

  HolonomicConstraint bad;
  bad.name = "bad";
  bad.dim = 0;
  ConstraintSet set;
  CHECK_THROWS_AS(set.add(bad), InvalidArgumentError);
}

}  // TEST_SUITE

TEST_SUITE("contact_admissibility") {

TEST_CASE("planar point contact pyramid") {
  const ContactLimits limits{0.6, 0.0};
  const double c = 0.6 / std::sqrt(2.0);

  auto r = contactAdmissibility((Eigen::VectorXd(2) << 0.0, 10.0).finished(),
                                WrenchLayout::kPointPlanar, limits);
  CHECK(r.admissible);
  CHECK(r.worst == doctest::Approx(c * 10.0));
  CHECK(r.cone_margin == doctest::Approx(6.0));

  // Between the inscribed pyramid and the true cone: rejected, flagged.
  r = contactAdmissibility((Eigen::VectorXd(2) << 5.0, 10.0).finished(),
                           WrenchLayout::kPointPlanar, limits);
  CHECK_FALSE(r.admissible);
  CHECK(r.worst == doctest::Approx(c * 10.0 - 5.0));
  CHECK(r.cone_margin == doctest::Approx(1.0));

  r = contactAdmissibility((Eigen::VectorXd(2) << 0.0, -1.0).finished(),
                           WrenchLayout::kPointPlanar, limits);
  CHECK_FALSE(r.admissible);
  CHECK(r.worst == doctest::Approx(-1.0));
}

TEST_CASE("spatial point and line contacts") {
  const ContactLimits point_limits{0.6, 0.0};
  auto r = contactAdmissibility((Eigen::VectorXd(3) << 1.0, 1.0, 10.0).finished(),
                                WrenchLayout::kPoint3D, point_limits);
  CHECK(r.admissible);
  CHECK(r.cone_margin == doctest::Approx(6.0 - std::sqrt(2.0)));

  const ContactLimits line_limits{0.6, 0.14};
  r = contactAdmissibility((Eigen::VectorXd(5) << 0.0, 0.0, 10.0, 1.0, -1.0).finished(),
                           WrenchLayout::kLine3D, line_limits);
  CHECK(r.admissible);
  CHECK(r.worst == doctest::Approx(0.4));

  r = contactAdmissibility((Eigen::VectorXd(5) << 0.0, 0.0, 10.0, 2.0, 0.0).finished(),
                           WrenchLayout::kLine3D, line_limits);
  CHECK_FALSE(r.admissible);
  CHECK(r.worst == doctest::Approx(-0.6));
}

TEST_CASE("layout bookkeeping and validation") {
  CHECK(wrenchDimension(WrenchLayout::kNone) == 0);
  CHECK(wrenchDimension(WrenchLayout::kPointPlanar) == 2);
  CHECK(wrenchDimension(WrenchLayout::kPoint3D) == 3);
  CHECK(wrenchDimension(WrenchLayout::kLine3D) == 5);

  CHECK(admissibilityRows(WrenchLayout::kPointPlanar, {0.6, 0.0}).rows() == 3);
  CHECK(admissibilityRows(WrenchLayout::kPoint3D, {0.6, 0.0}).rows() == 5);
  CHECK(admissibilityRows(WrenchLayout::kLine3D, {0.6, 0.14}).rows() == 9);

  CHECK_THROWS_AS(admissibilityRows(WrenchLayout::kPointPlanar, {0.0, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(admissibilityRows(WrenchLayout::kLine3D, {0.6, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(contactAdmissibility(Eigen::VectorXd::Zero(3), WrenchLayout::kPointPlanar,
                                       ContactLimits{0.6, 0.0}),
                  InvalidArgumentError);
}

}  // TEST_SUITE
