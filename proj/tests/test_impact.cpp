#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hzdclf/dynamics/dynamics.hpp"
#include "hzdclf/models/cb5.hpp"
#include "hzdclf/models/planar_chain.hpp"
#include "test_util.hpp"

using namespace hzdclf;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

double maxAbs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Single floating rod, 1 m, 1 kg, com at mid-length, with a tip marker.
PlanarChain fallingRod() {
  PlanarChainConfig cfg;
  cfg.links.push_back({"rod", -1, Vector2d::Zero(), 1.0, Vector2d(0.0, -0.5), 1.0 / 12.0});
  cfg.markers.push_back({"tip", 0, Vector2d(0.0, -1.0)});
  cfg.markers.push_back({"com", 0, Vector2d(0.0, -0.5)});
  return PlanarChain(cfg);
}

// CB5 state just before swing-foot touchdown: left stance, right leg forward.
void preImpactState(const Cb5Model& cb5, VectorXd& q, VectorXd& qd) {
  q = cb5.symmetricPose(0.7);
  q(Cb5Model::kLeftHip) -= 0.2;
  q(Cb5Model::kRightHip) += 0.25;
  // Put the swing foot on the ground by adjusting base height.
  q(Cb5Model::kBaseZ) -= cb5.markerPosition(q, "foot_right")(1);
  qd = VectorXd::Zero(9);
  qd(Cb5Model::kBaseX) = 0.8;
  qd(Cb5Model::kBaseZ) = -0.3;
  qd(Cb5Model::kRightHip) = -0.5;
  qd(Cb5Model::kRightKnee) = 0.4;
}

ConstraintSet postImpactSet(const Cb5Model& cb5, const VectorXd& q) {
  ConstraintSet set;
  set.add(cb5.contactConstraint("foot_right", cb5.markerPosition(q, "foot_right")));
  set.add(cb5.jointLockConstraint("spring_lock_left", Cb5Model::kLeftSpring, 0.0));
  set.add(cb5.jointLockConstraint("spring_lock_right", Cb5Model::kRightSpring, 0.0));
  return set;
}

}  // namespace

TEST_SUITE("impact") {

TEST_CASE("empty constraint set leaves the velocity untouched") {
  const PlanarChain rod = fallingRod();
  VectorXd q(3), qd(3);
  q << 0.2, 1.0, 0.3;
  qd << 0.5, -2.0, 1.0;
  const auto res = impactMap(rod, q, qd, ConstraintSet());
  CHECK(res.impulse.size() == 0);
  CHECK(maxAbs(res.q_plus - q) == 0.0);
  CHECK(maxAbs(res.qd_plus - qd) == 0.0);
}

TEST_CASE("falling rod: tip impact conserves angular momentum about the tip") {
  const PlanarChain rod = fallingRod();
  auto gen = test::rng(421);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd q(3), qd(3);
    q << test::randn(gen), 1.0 + 0.2 * test::randn(gen), test::uniform(gen, -1.2, 1.2);
    qd << test::randnVector(gen, 3);
    // Drive the tip straight down so the normal impulse sign is determined.
    const Vector2d tip_v = rod.markerVelocity(q, qd, "tip");
    qd(0) -= tip_v(0);
    qd(1) -= tip_v(1) + test::uniform(gen, 0.3, 1.5);

    ConstraintSet set;
    set.add(rod.contactConstraint("tip", rod.markerPosition(q, "tip")));
    const auto res = impactMap(rod, q, qd, set);

    // Tip velocity is zero afterwards.
    CHECK(maxAbs(rod.markerVelocity(res.q_plus, res.qd_plus, "tip")) <= 1e-10);

    // Angular momentum about the (instantaneously fixed) tip is conserved:
    // the impulsive force acts through that point.
    const Vector2d r_tip = rod.markerPosition(q, "tip");
    const auto momentum = [&](const VectorXd& v) {
      const Vector2d r_com = rod.markerPosition(q, "com");
      const Vector2d v_com = rod.markerVelocity(q, v, "com");
      const Vector2d arm = r_com - r_tip;
      return 1.0 * (arm(0) * v_com(1) - arm(1) * v_com(0)) + (1.0 / 12.0) * v(2);
    };
    CHECK(momentum(qd) == doctest::Approx(momentum(res.qd_plus)).epsilon(1e-10));

    // Momentum balance: D (qd+ - qd-) = J' * impulse.
    const VectorXd balance = rod.massMatrix(q) * (res.qd_plus - qd) -
                             set.jacobian(q).transpose() * res.impulse;
    CHECK(maxAbs(balance) <= 1e-10);

    // The ground pushes up on a falling rod.
    CHECK(res.impulse(1) > 0.0);
  }
}

TEST_CASE("step impact: new stance foot sticks and springs reset cleanly") {
  const Cb5Model cb5;
  VectorXd q, qd;
  preImpactState(cb5, q, qd);
  const ConstraintSet set = postImpactSet(cb5, q);
  const auto res = impactMap(cb5, q, qd, set);

  // Spring coordinates land exactly at zero with zero rate.
  CHECK(res.q_plus(Cb5Model::kLeftSpring) == 0.0);
  CHECK(res.q_plus(Cb5Model::kRightSpring) == 0.0);
  CHECK(res.qd_plus(Cb5Model::kLeftSpring) == 0.0);
  CHECK(res.qd_plus(Cb5Model::kRightSpring) == 0.0);

  // All post-impact constraint rates vanish at the reset state.
  CHECK(maxAbs(set.jacobian(res.q_plus) * res.qd_plus) <= 1e-10);
  CHECK(maxAbs(cb5.markerVelocity(res.q_plus, res.qd_plus, "foot_right")) <= 1e-10);

  // The reset leaves non-spring coordinates untouched.
  for (int i = 0; i < 9; ++i) {
    if (i == Cb5Model::kLeftSpring || i == Cb5Model::kRightSpring) continue;
    CHECK(res.q_plus(i) == q(i));
  }

  // Normal impulse is positive for a downward-moving swing foot.
  CHECK(res.impulse(1) > 0.0);
}

TEST_CASE("impacts never add kinetic energy") {
  const Cb5Model cb5;
  auto gen = test::rng(422);
  double worst_gain = -1e30;
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd q(9);
    q << test::uniform(gen, -0.5, 0.5), test::uniform(gen, 0.6, 0.9),
        test::uniform(gen, -0.3, 0.3), test::uniform(gen, -0.6, 0.6),
        test::uniform(gen, 0.3, 1.1), 0.0, test::uniform(gen, -0.6, 0.6),
        test::uniform(gen, 0.3, 1.1), 0.0;
    const VectorXd qd = test::randnVector(gen, 9);

    const ConstraintSet set = postImpactSet(cb5, q);
    const auto res = impactMap(cb5, q, qd, set);

    // Spring coordinates were already zero, so the reset keeps q; kinetic
    // energy compares pre- and post-velocities in the same mass matrix.
    const double ke_pre = cb5.kineticEnergy(q, qd);
    const double ke_post = cb5.kineticEnergy(res.q_plus, res.qd_plus);
    worst_gain = std::max(worst_gain, ke_post - ke_pre);
    CHECK(ke_post <= ke_pre + 1e-10 * (1.0 + ke_pre));
  }
  CHECK(worst_gain <= 1e-10);
}

TEST_CASE("applying the impact twice is the same as applying it once") {
  const Cb5Model cb5;
  VectorXd q, qd;
  preImpactState(cb5, q, qd);
  const ConstraintSet set = postImpactSet(cb5, q);

  const auto once = impactMap(cb5, q, qd, set);
  const ConstraintSet set_plus = postImpactSet(cb5, once.q_plus);
  const auto twice = impactMap(cb5, once.q_plus, once.qd_plus, set_plus);

  CHECK(maxAbs(twice.q_plus - once.q_plus) <= 1e-12);
  CHECK(maxAbs(twice.qd_plus - once.qd_plus) <= 1e-10);
  CHECK(maxAbs(twice.impulse) <= 1e-9);
}

}  // TEST_SUITE
