#include "hzdclf/numeric/care.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hzdclf/errors.hpp"
#include "test_util.hpp"

using namespace hzdclf;
namespace tst = hzdclf::test;

namespace {

// Double-integrator chain F = [0 I; 0 0], G = [0; I] of output dimension m.
void doubleIntegrator(int m, Eigen::MatrixXd& F, Eigen::MatrixXd& G) {
  F = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  F.topRightCorner(m, m).setIdentity();
  G = Eigen::MatrixXd::Zero(2 * m, m);
  G.bottomRows(m).setIdentity();
}

}  // namespace

TEST_SUITE("care") {

TEST_CASE("scalar closed form") {
  // a=1, b=1, q=2, r=1: P = r (a + sqrt(a^2 + b^2 q / r)) / b^2 = 1 + sqrt(3)
  Eigen::MatrixXd F = Eigen::MatrixXd::Constant(1, 1, 1.0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Constant(1, 1, 1.0);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Constant(1, 1, 2.0);
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd P = solveCare(F, G, Q, R);
  CHECK(P(0, 0) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("classic double integrator") {
  Eigen::MatrixXd F, G;
  doubleIntegrator(1, F, G);
  const Eigen::MatrixXd P =
      solveCare(F, G, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 1));
  CHECK(P(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(P(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(P(1, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("block closed form matches the general solver on random diagonal weights") {
  auto gen = tst::rng(0xca12e);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(gen() % 5);
    Eigen::VectorXd qu(m), ql(m), r(m);
    for (int i = 0; i < m; ++i) {
      qu(i) = std::exp(tst::uniform(gen, 0.0, 8.0));
      ql(i) = (gen() % 4 == 0) ? 0.0 : std::exp(tst::uniform(gen, -1.0, 4.0));
      r(i) = std::exp(tst::uniform(gen, -0.5, 1.0));
    }
    const Eigen::MatrixXd Pblock = careBlockSolution(qu, ql, r);

    Eigen::MatrixXd F, G;
    doubleIntegrator(m, F, G);
    Eigen::VectorXd qdiag(2 * m);
    qdiag << qu, ql;
    const Eigen::MatrixXd Q = qdiag.asDiagonal();
    const Eigen::MatrixXd R = r.asDiagonal();

    CHECK(careResidual(Pblock, F, G, Q, R) <= 1e-8 * (1.0 + Q.lpNorm<Eigen::Infinity>()));

    // An off-structure perturbation must route through the Hamiltonian path
    // and still land on the same solution.
    Eigen::MatrixXd Qdense = Q;
    Qdense(0, 0) += 0.0;  // Q stays diagonal; perturb F instead
    Eigen::MatrixXd Fp = F;
    Fp(0, 0) += 1e-30;  // breaks the exact-structure detection only
    const Eigen::MatrixXd Pgen = solveCare(Fp, G, Qdense, R);
    CHECK((Pgen - Pblock).lpNorm<Eigen::Infinity>() <=
          1e-6 * (1.0 + Pblock.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("random stabilizable instances: residual, symmetry, PSD, Hurwitz closed loop") {
  auto gen = tst::rng(0xbeef);
  int solved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 10);
    const int m = 1 + static_cast<int>(gen() % n);
    const Eigen::MatrixXd F = tst::randnMatrix(gen, n, n);
    const Eigen::MatrixXd G = tst::randnMatrix(gen, n, m);
    const Eigen::MatrixXd M = tst::randnMatrix(gen, n, n);
    const Eigen::MatrixXd Q = M.transpose() * M + 1e-3 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd R = tst::randomSpd(gen, m, 0.2);

    Eigen::MatrixXd P;
    try {
      P = solveCare(F, G, Q, R);
    } catch (const SolverError&) {
      continue;  // the random draw was not stabilizable
    }
    ++solved;
    const double scale = 1.0 + Q.lpNorm<Eigen::Infinity>();
    CHECK(careResidual(P, F, G, Q, R) <= 1e-8 * scale);
    CHECK((P - P.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(P);
    CHECK(sa.eigenvalues().minCoeff() >= -1e-9 * scale);
    const Eigen::MatrixXd Acl = F - G * R.ldlt().solve(G.transpose() * P);
    CHECK(Eigen::EigenSolver<Eigen::MatrixXd>(Acl).eigenvalues().real().maxCoeff() < 0.0);
  }
  CHECK(solved >= 950);  // random square systems are almost surely controllable
}

TEST_CASE("unstabilizable system throws") {
  // Unstable mode decoupled from the input.
  Eigen::MatrixXd F = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  Eigen::MatrixXd G(2, 1);
  G << 0.0, 1.0;
  CHECK_THROWS_AS(solveCare(F, G, Eigen::MatrixXd::Identity(2, 2),
                            Eigen::MatrixXd::Identity(1, 1)),
                  SolverError);
}

TEST_CASE("input validation") {
  Eigen::MatrixXd F, G;
  doubleIntegrator(1, F, G);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd Rbad = Eigen::MatrixXd::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(solveCare(F, G, Q, Rbad), InvalidArgumentError);

  Eigen::MatrixXd Qasym = Q;
  Qasym(0, 1) = 0.3;
  CHECK_THROWS_AS(solveCare(F, G, Qasym, Eigen::MatrixXd::Identity(1, 1)),
                  InvalidArgumentError);

  CHECK_THROWS_AS(careBlockSolution(Eigen::VectorXd::Constant(1, -1.0),
                                    Eigen::VectorXd::Zero(1),
                                    Eigen::VectorXd::Ones(1)),
                  InvalidArgumentError);
}

TEST_CASE("lyapunov solver") {
  auto gen = tst::rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 8);
    Eigen::MatrixXd A = tst::randnMatrix(gen, n, n);
    A -= (Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues().real().maxCoeff() + 0.5) *
         Eigen::MatrixXd::Identity(n, n);  // shift to Hurwitz
    const Eigen::MatrixXd W = -tst::randomSpd(gen, n);
    const Eigen::MatrixXd X = solveLyapunov(A, W);
    CHECK((A.transpose() * X + X * A - W).lpNorm<Eigen::Infinity>() <=
          1e-8 * (1.0 + W.lpNorm<Eigen::Infinity>()));
    // A Hurwitz and W negative definite force X positive definite.
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(X).eigenvalues().minCoeff() > 0.0);
  }
}

}  // TEST_SUITE
