#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "hzdclf/errors.hpp"
#include "hzdclf/io/json_io.hpp"
#include "hzdclf/models/cassie_kinematics.hpp"
#include "hzdclf/models/cb5.hpp"
#include "hzdclf/models/model_io.hpp"
#include "test_util.hpp"

using namespace hzdclf;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

double maxAbs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Independent copy of the knee/tarsus closure polynomial, so the production
// root finder is checked against a reimplementation rather than itself.
double closurePoly(double qk, double qt) {
  return 0.028794 + 0.118906 * std::cos(qk) - 0.112216 * std::cos(qt) -
         0.0280613 * std::cos(qk + qt) - 0.0161784 * std::sin(qk) - 0.0425142 * std::sin(qt) -
         0.00647928 * std::sin(qk + qt);
}

// Oracle: densely sample (0, pi), bisect every bracket, keep the largest root.
double largestClosureRootOracle(double qk) {
  const double pi = std::acos(-1.0);
  const int n = 20000;
  double best = std::numeric_limits<double>::quiet_NaN();
  double prev_t = pi * 1.0 / (n + 1);
  double prev_f = closurePoly(qk, prev_t);
  for (int i = 2; i <= n; ++i) {
    const double t = pi * i / (n + 1);
    const double f = closurePoly(qk, t);
    if (prev_f == 0.0) best = prev_t;
    if (prev_f * f < 0.0) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (closurePoly(qk, lo) * closurePoly(qk, mid) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      best = 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_f = f;
  }
  REQUIRE(std::isfinite(best));
  return best;
}

// Minimal 22-coordinate model exposing only the spring catalog, enough to
// exercise the default springForces path with the biped's leg springs.
class SpringCatalogStub : public RobotModel {
 public:
  int numPositions() const override { return 22; }
  int numActuators() const override { return 0; }
  MatrixXd massMatrix(const VectorXd&) const override { return MatrixXd::Identity(22, 22); }
  MatrixXd coriolisMatrix(const VectorXd&, const VectorXd&) const override {
    return MatrixXd::Zero(22, 22);
  }
  VectorXd gravityForces(const VectorXd&) const override { return VectorXd::Zero(22); }
  MatrixXd actuationMatrix() const override { return MatrixXd::Zero(22, 0); }
  double potentialEnergy(const VectorXd&) const override { return 0.0; }
  std::vector<SpringEntry> springs() const override { return cassie::constants().springCatalog(); }
};

}  // namespace

TEST_SUITE("cassie_kinematics") {

TEST_CASE("constants and the spring catalog") {
  const auto& c = cassie::constants();
  CHECK(c.num_positions == 22);
  CHECK(c.base_dim == 6);
  CHECK(c.leg_dim == 8);
  CHECK(c.left_shin_spring == 10);
  CHECK(c.left_heel_spring == 12);
  CHECK(c.right_shin_spring == 18);
  CHECK(c.right_heel_spring == 20);
  CHECK(c.shin_spring_stiffness == 2300.0);
  CHECK(c.shin_spring_damping == 4.4);
  CHECK(c.heel_spring_stiffness == 2000.0);
  CHECK(c.heel_spring_damping == 4.0);
  CHECK(c.achilles_length == 0.5012);
  REQUIRE(c.reflected_inertia_leg.size() == 5);
  CHECK(c.reflected_inertia_leg[0] == 1.435046);
  CHECK(c.reflected_inertia_leg[2] == 1.435046);
  CHECK(c.reflected_inertia_leg[3] == 1.44662);
  CHECK(c.reflected_inertia_leg[4] == 1.44662);

  const auto catalog = c.springCatalog();
  REQUIRE(catalog.size() == 4);

  const SpringCatalogStub stub;
  VectorXd q = VectorXd::Zero(22);
  VectorXd qd = VectorXd::Zero(22);
  q(10) = 0.01;
  VectorXd kappa = stub.springForces(q, qd);
  CHECK(kappa(10) == doctest::Approx(-23.0).epsilon(1e-12));
  CHECK(kappa.cwiseAbs().sum() == doctest::Approx(23.0).epsilon(1e-12));

  q.setZero();
  q(12) = 0.01;
  qd(12) = 1.0;
  kappa = stub.springForces(q, qd);
  CHECK(kappa(12) == doctest::Approx(-(2000.0 * 0.01 + 4.0)).epsilon(1e-12));
}

TEST_CASE("leg length expression") {
  CHECK(cassie::legLength(0.0) == doctest::Approx(0.727 * std::sqrt(2.002)).epsilon(1e-12));
  // Monotone decreasing as the knee folds over the working range.
  double prev = cassie::legLength(0.0);
  for (double qk = 0.01; qk <= 2.0; qk += 0.01) {
    const double cur = cassie::legLength(qk);
    CHECK(cur < prev);
    prev = cur;
  }
  // The radicand never reaches zero for real knee angles; the length is
  // positive everywhere on a full revolution.
  for (double qk = -3.2; qk <= 3.2; qk += 0.005) {
    CHECK(cassie::legLength(qk) > 0.0);
  }
}

TEST_CASE("neutral tarsus angle solves the closure") {
  for (const double qk : {-1.0, 0.0, 0.5, 1.0, 1.5}) {
    const double qt = cassie::neutralTarsus(qk);
    CHECK(qt > 0.0);
    CHECK(qt < std::acos(-1.0));
    CHECK(std::abs(cassie::tarsusClosureResidual(qk, qt)) <= 1e-10);
    CHECK(qt == doctest::Approx(largestClosureRootOracle(qk)).epsilon(1e-9));
  }
}

TEST_CASE("neutral tarsus angle is continuous across the working knee range") {
  double prev = cassie::neutralTarsus(0.5);
  double worst_step = 0.0;
  for (double qk = 0.5001; qk <= 1.5 + 1e-12; qk += 1e-4) {
    const double cur = cassie::neutralTarsus(qk);
    worst_step = std::max(worst_step, std::abs(cur - prev));
    prev = cur;
  }
  CHECK(worst_step <= 1e-2);
}

TEST_CASE("reported gap between the closure root and the rigid shortcut") {
  // The rigid relation (13 degrees minus knee) tracks the closure root well
  // on the physical knee range; report the spread rather than asserting it.
  double worst = 0.0;
  for (double qk = -1.6; qk <= -0.5 + 1e-12; qk += 0.01) {
    worst = std::max(worst, std::abs(cassie::neutralTarsus(qk) - cassie::rigidTarsusApprox(qk)));
  }
  MESSAGE("closure root vs rigid shortcut, knee in [-1.6, -0.5]: max gap ", worst, " rad");
  CHECK(cassie::rigidTarsusApprox(0.0) == doctest::Approx(13.0 * std::acos(-1.0) / 180.0));
}

TEST_CASE("achilles residual and the leg reset") {
  CHECK(cassie::achillesResidual(0.5012) == 0.0);
  CHECK(cassie::achillesResidual(0.5112) == doctest::Approx(0.01).epsilon(1e-12));

  VectorXd q_leg(8);
  q_leg << 0.1, 0.2, 0.3, 0.8, 0.05, 1.0, -0.02, 0.4;
  const VectorXd out = cassie::legReset(q_leg);
  CHECK(out(0) == 0.1);
  CHECK(out(1) == 0.2);
  CHECK(out(2) == 0.3);
  CHECK(out(3) == 0.8);
  CHECK(out(4) == 0.0);
  CHECK(out(5) == doctest::Approx(cassie::neutralTarsus(0.8)).epsilon(1e-14));
  CHECK(out(6) == 0.0);
  CHECK(out(7) == 0.4);

  CHECK_THROWS_AS(cassie::legReset(VectorXd::Zero(7)), InvalidArgumentError);
}

}  // TEST_SUITE

TEST_SUITE("cb5_model") {

TEST_CASE("mass budget and gravity") {
  const Cb5Model cb5;
  CHECK(cb5.numPositions() == 9);
  CHECK(cb5.numActuators() == 4);
  CHECK(cb5.totalMass() == doctest::Approx(14.0).epsilon(1e-12));

  // Gravity acts only through the base height, whatever the joints do.
  auto gen = test::rng(431);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd q = test::randnVector(gen, 9);
    const VectorXd g = cb5.gravityForces(q);
    CHECK(g(Cb5Model::kBaseX) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g(Cb5Model::kBaseZ) == doctest::Approx(14.0 * 9.81).epsilon(1e-12));
  }
}

TEST_CASE("leg line length and pitch agree with the chain kinematics") {
  const Cb5Model cb5;
  auto gen = test::rng(432);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd q = test::randnVector(gen, 9);
    q(Cb5Model::kLeftSpring) = 0.0;  // the closed forms assume a neutral spring
    const double knee = test::uniform(gen, 0.1, 2.5);
    q(Cb5Model::kLeftKnee) = knee;

    const Vector2d hip = cb5.markerPosition(q, "hip");
    const Vector2d foot = cb5.markerPosition(q, "foot_left");
    const double psi = q(Cb5Model::kTorsoPitch) + q(Cb5Model::kLeftHip) + cb5.legPitchOffset(knee);
    const Vector2d predicted =
        hip + cb5.legLength(knee) * Vector2d(std::sin(psi), -std::cos(psi));
    CHECK(maxAbs(foot - predicted) <= 1e-12);
  }

  // Equal thigh and shin make the pitch offset exactly half the knee angle.
  for (const double knee : {0.2, 0.7, 1.3, 2.1}) {
    CHECK(cb5.legLength(knee) == doctest::Approx(0.8 * std::cos(knee / 2.0)).epsilon(1e-14));
    CHECK(cb5.legPitchOffset(knee) == doctest::Approx(knee / 2.0).epsilon(1e-14));
    CHECK(cb5.legPitchOffsetDerivative(knee) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cb5.legPitchOffsetSecondDerivative(knee) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cb5.legLength(std::acos(-1.0)), SolverError);
}

TEST_CASE("closed-form leg derivatives match finite differences") {
  const Cb5Model cb5;
  const double h = 1e-6;
  for (const double knee : {0.15, 0.45, 0.9, 1.4, 2.2}) {
    const double dl = (cb5.legLength(knee + h) - cb5.legLength(knee - h)) / (2.0 * h);
    CHECK(cb5.legLengthDerivative(knee) == doctest::Approx(dl).epsilon(1e-7));
    const double d2l =
        (cb5.legLengthDerivative(knee + h) - cb5.legLengthDerivative(knee - h)) / (2.0 * h);
    CHECK(cb5.legLengthSecondDerivative(knee) == doctest::Approx(d2l).epsilon(1e-6));
    const double dxi = (cb5.legPitchOffset(knee + h) - cb5.legPitchOffset(knee - h)) / (2.0 * h);
    CHECK(cb5.legPitchOffsetDerivative(knee) == doctest::Approx(dxi).epsilon(1e-7));
  }
}

TEST_CASE("symmetric pose stands on coincident feet") {
  const Cb5Model cb5;
  const VectorXd q = cb5.symmetricPose(0.7);
  CHECK(q(Cb5Model::kTorsoPitch) == 0.0);
  CHECK(maxAbs(cb5.markerPosition(q, "foot_left")) <= 1e-12);
  CHECK(maxAbs(cb5.markerPosition(q, "foot_right")) <= 1e-12);
  const Vector2d hip = cb5.markerPosition(q, "hip");
  CHECK(hip(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hip(1) == doctest::Approx(cb5.legLength(0.7)).epsilon(1e-12));
}

TEST_CASE("spring force convention") {
  const Cb5Model cb5;
  VectorXd q = VectorXd::Zero(9);
  VectorXd qd = VectorXd::Zero(9);
  q(Cb5Model::kLeftSpring) = 0.05;
  VectorXd kappa = cb5.springForces(q, qd);
  CHECK(kappa(Cb5Model::kLeftSpring) == doctest::Approx(-30.0).epsilon(1e-12));
  qd(Cb5Model::kLeftSpring) = 1.0;
  kappa = cb5.springForces(q, qd);
  CHECK(kappa(Cb5Model::kLeftSpring) == doctest::Approx(-32.0).epsilon(1e-12));
  // And it enters the bias with the restoring sign: H = C qd + G - kappa.
  const VectorXd h = cb5.biasForces(q, VectorXd::Zero(9));
  CHECK(h(Cb5Model::kLeftSpring) ==
        doctest::Approx(cb5.gravityForces(q)(Cb5Model::kLeftSpring) + 30.0).epsilon(1e-12));
}

TEST_CASE("free fall conserves energy when the dampers are removed") {
  Cb5Parameters params;
  params.spring_damping = 0.0;
  const Cb5Model cb5(params);

  VectorXd x(18);
  x.head(9) = cb5.symmetricPose(0.7);
  auto gen = test::rng(433);
  x.tail(9) = 0.3 * test::randnVector(gen, 9);
  x(5 + 9) = 0.5;  // make the springs participate
  x(8 + 9) = -0.4;

  const double e0 = cb5.totalEnergy(x.head(9), x.tail(9));
  const auto deriv = [&](const VectorXd& s) {
    VectorXd out(18);
    out.head(9) = s.tail(9);
    const VectorXd h = cb5.biasForces(s.head(9), s.tail(9));
    out.tail(9) = cb5.massMatrix(s.head(9)).ldlt().solve(-h);
    return out;
  };
  for (int step = 0; step < 5000; ++step) x = test::rk4Step(deriv, x, 1e-4);
  const double e1 = cb5.totalEnergy(x.head(9), x.tail(9));
  CHECK(std::abs(e1 - e0) <= 1e-6 * (1.0 + std::abs(e0)));
}

TEST_CASE("impact relabel zeroes the spring coordinates only") {
  const Cb5Model cb5;
  auto gen = test::rng(434);
  const VectorXd q = test::randnVector(gen, 9);
  const VectorXd qd = test::randnVector(gen, 9);

  const VectorXd q_plus = cb5.resetPositions(q);
  CHECK(q_plus(Cb5Model::kLeftSpring) == 0.0);
  CHECK(q_plus(Cb5Model::kRightSpring) == 0.0);
  for (int i : {0, 1, 2, 3, 4, 6, 7}) CHECK(q_plus(i) == q(i));

  const VectorXd qd_plus = cb5.resetVelocityMap(q) * qd;
  CHECK(qd_plus(Cb5Model::kLeftSpring) == 0.0);
  CHECK(qd_plus(Cb5Model::kRightSpring) == 0.0);
  for (int i : {0, 1, 2, 3, 4, 6, 7}) CHECK(qd_plus(i) == qd(i));
}

TEST_CASE("constraint catalog") {
  const Cb5Model cb5;
  const auto catalog = cb5.constraintCatalog();
  REQUIRE(catalog.size() == 5);
  CHECK(catalog[0].name == "contact_foot_left");
  CHECK(catalog[0].kind == ConstraintKind::kContact);
  CHECK(catalog[0].layout == WrenchLayout::kPointPlanar);
  CHECK(catalog[0].dim == 2);
  CHECK(catalog[1].name == "contact_foot_right");
  CHECK(catalog[2].name == "spring_lock_left");
  CHECK(catalog[2].kind == ConstraintKind::kJointLock);
  CHECK(catalog[3].name == "spring_lock_right");
  CHECK(catalog[4].name == "interfoot_distance");
  CHECK(catalog[4].kind == ConstraintKind::kClosure);

  // At a split stance the closure measures the (signed) gap to 0.3 m.
  VectorXd q = cb5.symmetricPose(0.7);
  q(Cb5Model::kLeftHip) -= 0.2;
  q(Cb5Model::kRightHip) += 0.2;
  const double gap =
      (cb5.markerPosition(q, "foot_left") - cb5.markerPosition(q, "foot_right")).norm();
  CHECK(catalog[4].value(q)(0) == doctest::Approx(gap - 0.3).epsilon(1e-12));
}

}  // TEST_SUITE

TEST_SUITE("model_io") {

TEST_CASE("base64 payloads round-trip byte for byte") {
  auto gen = test::rng(435);
  for (const int len : {0, 1, 2, 3, 4, 57, 100}) {
    std::vector<std::uint8_t> bytes(len);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(gen() & 0xff);
    const std::string text = base64Encode(bytes.data(), bytes.size());
    CHECK(base64Decode(text) == bytes);
  }
  CHECK(base64Encode(nullptr, 0) == "");
  CHECK_THROWS_AS(base64Decode("ab!d"), ConfigError);
  CHECK_THROWS_AS(base64Decode("abcde"), ConfigError);
}

TEST_CASE("matrix blocks survive serialization bit-exactly") {
  auto gen = test::rng(436);
  MatrixXd m = test::randnMatrix(gen, 5, 7);
  m(0, 0) = 1e-308;
  m(1, 1) = -1e308;
  m(2, 2) = -0.0;
  const nlohmann::json j = matrixToJson(m);
  const MatrixXd back = matrixFromJson(j, "test");
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 7);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 7; ++c) CHECK(back(r, c) == m(r, c));
  }
  CHECK(std::signbit(back(2, 2)));

  nlohmann::json bad = j;
  bad["rows"] = 6;
  CHECK_THROWS_AS(matrixFromJson(bad, "test"), ConfigError);
}

TEST_CASE("compliant biped round-trips through the model file format") {
  Cb5Parameters params;
  params.torso_mass = 11.5;
  params.spring_stiffness = 550.0;
  params.torque_limit = 75.0;

  const nlohmann::json j = cb5ModelJson(params);
  CHECK(j.at("schema") == "hzdclf-model-v1");
  CHECK(j.at("name") == "cb5");

  const auto model = modelFromJson(j);
  CHECK(modelToJson(*model) == j);

  const Cb5Parameters back = cb5ParametersFromJson(j);
  CHECK(back.torso_mass == params.torso_mass);
  CHECK(back.thigh_length == params.thigh_length);
  CHECK(back.shin_length == params.shin_length);
  CHECK(back.rotor_inertia == params.rotor_inertia);
  CHECK(back.spring_stiffness == params.spring_stiffness);
  CHECK(back.spring_damping == params.spring_damping);
  CHECK(back.gravity == params.gravity);
  CHECK(back.friction_mu == params.friction_mu);
  CHECK(back.torque_limit == params.torque_limit);
}

TEST_CASE("generic model reproduces the typed model") {
  const Cb5Model cb5;
  const auto generic = modelFromJson(cb5ModelJson());
  CHECK(generic->name() == "cb5");
  CHECK(generic->frictionMu() == cb5.parameters().friction_mu);
  CHECK(generic->torqueLimit() == cb5.parameters().torque_limit);

  auto gen = test::rng(437);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd q = test::randnVector(gen, 9);
    const VectorXd qd = test::randnVector(gen, 9);
    CHECK(maxAbs(generic->massMatrix(q) - cb5.massMatrix(q)) <= 1e-14);
    CHECK(maxAbs(generic->biasForces(q, qd) - cb5.biasForces(q, qd)) <= 1e-12);
    CHECK(maxAbs(generic->resetPositions(q) - cb5.resetPositions(q)) == 0.0);
  }

  const auto catalog_a = generic->constraintCatalog();
  const auto catalog_b = cb5.constraintCatalog();
  REQUIRE(catalog_a.size() == catalog_b.size());
  const VectorXd q = cb5.symmetricPose(0.8);
  for (std::size_t i = 0; i + 1 < catalog_a.size(); ++i) {  // closure needs split feet
    CHECK(catalog_a[i].name == catalog_b[i].name);
    CHECK(maxAbs(catalog_a[i].jacobian(q) - catalog_b[i].jacobian(q)) <= 1e-14);
  }
}

TEST_CASE("files round-trip through disk") {
  const auto path =
      (std::filesystem::temp_directory_path() / "hzdclf_model_roundtrip.json").string();
  const auto model = modelFromJson(cb5ModelJson());
  saveModel(*model, path);
  const auto loaded = loadModel(path);
  CHECK(modelToJson(*loaded) == modelToJson(*model));
  std::remove(path.c_str());

  CHECK_THROWS_AS(loadModel("/nonexistent/path/model.json"), ConfigError);
}

TEST_CASE("strict parsing rejects malformed files") {
  const nlohmann::json good = cb5ModelJson();

  nlohmann::json j = good;
  j["schema"] = "hzdclf-model-v2";
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);

  j = good;
  j["surprise"] = 1;
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);

  j = good;
  j["constraints"][0]["type"] = "weld";
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);

  j = good;
  j["constraints"][0]["target"] = 0.0;  // contact entries have no target field
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);

  j = good;
  j["links"][0]["mass"] = -1.0;  // model validation surfaces as a config error
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);

  j = good;
  j.erase("gravity");
  CHECK_THROWS_AS(modelFromJson(j), ConfigError);
}

}  // TEST_SUITE
