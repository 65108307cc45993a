#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hzdclf/gait/gait_library.hpp"

namespace hzdclf {

// Channel samples of one step, column k taken at phase taus[k]. Row counts
// follow the node blocks; any matrix may be left empty to skip that block
// (its coefficients then stay at the fallback node's values).
struct GaitChannelSamples {
  std::vector<double> taus;
  Eigen::MatrixXd y;
  Eigen::MatrixXd p;
  Eigen::MatrixXd v;
  Eigen::MatrixXd qdd;
  Eigen::MatrixXd u;
  Eigen::MatrixXd lambda;
};

struct GaitFitResult {
  GaitNode node;
  double max_residual = 0.0;
  std::map<std::string, double> block_residuals;  // worst per fitted block
};

// Least-squares Bezier fit of every supplied channel block at the given
// degree. `base` provides the command, duration, metadata and any blocks
// without samples.
GaitFitResult fitGaitFromTrace(const GaitChannelSamples& samples, const GaitNode& base,
                               int degree = 6);

}  // namespace hzdclf
