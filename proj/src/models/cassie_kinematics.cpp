#include "hzdclf/models/cassie_kinematics.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf::cassie {

std::vector<SpringEntry> Constants::springCatalog() const {
  return {
      {left_shin_spring, shin_spring_stiffness, shin_spring_damping},
      {left_heel_spring, heel_spring_stiffness, heel_spring_damping},
      {right_shin_spring, shin_spring_stiffness, shin_spring_damping},
      {right_heel_spring, heel_spring_stiffness, heel_spring_damping},
  };
}

const Constants& constants() {
  static const Constants k;
  return k;
}

double legLength(double q_knee) {
  const double radicand = 1.002 + std::cos(q_knee) - 0.035 * std::sin(q_knee);
  if (radicand <= 0.0) throw SolverError("leg length undefined: knee folds the linkage");
  return 0.727 * std::sqrt(radicand);
}

double tarsusClosureResidual(double q_knee, double q_tarsus) {
  return 0.028794 + 0.118906 * std::cos(q_knee) - 0.112216 * std::cos(q_tarsus) -
         0.0280613 * std::cos(q_knee + q_tarsus) - 0.0161784 * std::sin(q_knee) -
         0.0425142 * std::sin(q_tarsus) - 0.00647928 * std::sin(q_knee + q_tarsus);
}

double neutralTarsus(double q_knee) {
  constexpr int kGrid = 1024;
  constexpr double kPi = 3.14159265358979323846;

  // Scan right-to-left so the first bracket found holds the largest root.
  double hi = kPi;
  double f_hi = tarsusClosureResidual(q_knee, hi);
  double lo = 0.0, f_lo = 0.0;
  bool bracketed = false;
  for (int i = kGrid - 1; i >= 0; --i) {
    lo = i * kPi / kGrid;
    f_lo = tarsusClosureResidual(q_knee, lo);
    if (f_lo == 0.0) return lo;
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      bracketed = true;
      break;
    }
    hi = lo;
    f_hi = f_lo;
  }
  if (!bracketed) {
    throw SolverError("tarsus closure has no root in (0, pi) at this knee angle");
  }

  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = tarsusClosureResidual(q_knee, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  if (std::abs(tarsusClosureResidual(q_knee, root)) > 1e-10) {
    throw SolverError("tarsus closure root did not converge");
  }
  return root;
}

double rigidTarsusApprox(double q_knee) { return 13.0 * 3.14159265358979323846 / 180.0 - q_knee; }

double achillesResidual(double distance) { return distance - constants().achilles_length; }

Eigen::VectorXd legReset(const Eigen::VectorXd& q_leg) {
  if (q_leg.size() != constants().leg_dim) {
    throw InvalidArgumentError("legReset expects one leg's 8 coordinates");
  }
  Eigen::VectorXd out = q_leg;
  out(4) = 0.0;                     // shin spring
  out(5) = neutralTarsus(q_leg(3));  // tarsus follows the knee with springs at rest
  out(6) = 0.0;                     // heel spring
  return out;
}

}  // namespace hzdclf::cassie
