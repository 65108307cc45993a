#include "hzdclf/gait/gait_fit.hpp"

#include <algorithm>

#include "hzdclf/errors.hpp"
#include "hzdclf/outputs/bezier.hpp"

namespace hzdclf {
namespace {

void fitBlock(const std::vector<double>& taus, const Eigen::MatrixXd& samples, int degree,
              const char* name, Eigen::MatrixXd* target, GaitFitResult* result) {
  if (samples.size() == 0) return;
  if (samples.cols() != static_cast<Eigen::Index>(taus.size())) {
    throw InvalidArgumentError(std::string("fitGaitFromTrace: block ") + name +
                               " has one column per phase sample");
  }
  const BezierFit fit = bezierFit(taus, samples, degree);
  *target = fit.coefficients;
  result->block_residuals[name] = fit.max_residual;
  result->max_residual = std::max(result->max_residual, fit.max_residual);
}

}  // namespace

GaitFitResult fitGaitFromTrace(const GaitChannelSamples& samples, const GaitNode& base,
                               int degree) {
  if (samples.taus.size() < static_cast<size_t>(degree) + 1) {
    throw InvalidArgumentError("fitGaitFromTrace: need at least degree + 1 phase samples");
  }
  GaitFitResult result;
  result.node = base;
  fitBlock(samples.taus, samples.y, degree, "alpha_y", &result.node.alpha_y, &result);
  fitBlock(samples.taus, samples.p, degree, "alpha_p", &result.node.alpha_p, &result);
  fitBlock(samples.taus, samples.v, degree, "alpha_v", &result.node.alpha_v, &result);
  fitBlock(samples.taus, samples.qdd, degree, "alpha_qdd", &result.node.alpha_qdd, &result);
  fitBlock(samples.taus, samples.u, degree, "alpha_u", &result.node.alpha_u, &result);
  fitBlock(samples.taus, samples.lambda, degree, "alpha_lambda", &result.node.alpha_lambda,
           &result);
  return result;
}

}  // namespace hzdclf
