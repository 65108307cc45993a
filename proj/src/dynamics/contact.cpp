#include "hzdclf/dynamics/contact.hpp"

#include <cmath>

#include "hzdclf/errors.hpp"

namespace hzdclf {

int wrenchDimension(WrenchLayout layout) {
  switch (layout) {
    case WrenchLayout::kNone:
      return 0;
    case WrenchLayout::kPointPlanar:
      return 2;
    case WrenchLayout::kPoint3D:
      return 3;
    case WrenchLayout::kLine3D:
      return 5;
  }
  return 0;
}

Eigen::MatrixXd admissibilityRows(WrenchLayout layout, const ContactLimits& limits) {
  if (limits.friction_mu <= 0.0) throw InvalidArgumentError("friction_mu must be positive");
  const double c = limits.friction_mu / std::sqrt(2.0);
  switch (layout) {
    case WrenchLayout::kNone:
      return Eigen::MatrixXd(0, 0);
    case WrenchLayout::kPointPlanar: {
      // wrench (fx, fz)
      Eigen::MatrixXd a(3, 2);
      a << 0, 1,   // fz >= 0
          -1, c,   // fx <= c fz
           1, c;   // fx >= -c fz
      return a;
    }
    case WrenchLayout::kPoint3D: {
      // wrench (fx, fy, fz)
      Eigen::MatrixXd a(5, 3);
      a << 0, 0, 1,
          -1, 0, c,
           1, 0, c,
           0, -1, c,
           0, 1, c;
      return a;
    }
    case WrenchLayout::kLine3D: {
      // wrench (fx, fy, fz, my, mz); moments bounded by the foot half length
      if (limits.foot_half_length <= 0.0) {
        throw InvalidArgumentError("line contact needs a positive foot_half_length");
      }
      const double l = limits.foot_half_length;
      Eigen::MatrixXd a(9, 5);
      a.setZero();
      a(0, 2) = 1;
      a.block(1, 0, 2, 3) << -1, 0, c, 1, 0, c;
      a.block(3, 0, 2, 3) << 0, -1, c, 0, 1, c;
      a(5, 2) = l; a(5, 3) = -1;
      a(6, 2) = l; a(6, 3) = 1;
      a(7, 2) = l; a(7, 4) = -1;
      a(8, 2) = l; a(8, 4) = 1;
      return a;
    }
  }
  return Eigen::MatrixXd(0, 0);
}

AdmissibilityReport contactAdmissibility(const Eigen::VectorXd& wrench, WrenchLayout layout,
                                         const ContactLimits& limits) {
  const int dim = wrenchDimension(layout);
  if (wrench.size() != dim) throw InvalidArgumentError("wrench size does not match layout");

  AdmissibilityReport report;
  report.margins = admissibilityRows(layout, limits) * wrench;
  report.worst = report.margins.minCoeff();
  report.admissible = report.worst >= 0.0;

  const double fz = wrench(dim == 2 ? 1 : 2);
  double tangential = 0.0;
  if (layout == WrenchLayout::kPointPlanar) {
    tangential = std::abs(wrench(0));
  } else {
    tangential = std::hypot(wrench(0), wrench(1));
  }
  report.cone_margin = limits.friction_mu * fz - tangential;
  return report;
}

}  // namespace hzdclf
