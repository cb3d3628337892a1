#include "wasse/kernel.hpp"

#include <cmath>

#include "wasse/errors.hpp"

namespace wasse {

namespace {

double bandwidth_denominator(const KernelParams& p) {
  return p.c * (p.denominator == KernelParams::Denominator::GammaSq
                    ? p.gamma * p.gamma
                    : std::pow(p.gamma, p.xi));
}

void validate(const KernelParams& p) {
  if (!(p.c > 0.0) || !(p.gamma > 0.0) || !(p.xi > 0.0)) {
    throw ConfigError("kernel parameters must satisfy c > 0, gamma > 0, xi > 0");
  }
}

}  // namespace

double kernel_value(double e, const KernelParams& p) {
  validate(p);
  const double a = std::abs(e);
  const double d = bandwidth_denominator(p);
  return std::pow(1.0 + std::pow(a, p.xi) / d, -(p.c + p.xi) / p.xi);
}

double kernel_cost(const Eigen::VectorXd& errors, const KernelParams& p) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < errors.size(); ++i) sum += kernel_value(errors[i], p);
  return sum;
}

double kernel_weight(double e, const KernelParams& p) {
  validate(p);
  constexpr double kFloor = 1e-6;
  const double a = std::abs(e);
  const double d = bandwidth_denominator(p);
  const double lead = std::pow(std::max(a, kFloor), p.xi - 2.0);
  const double tail = std::pow(1.0 + std::pow(a, p.xi) / d, -(p.c + 2.0 * p.xi) / p.xi);
  return lead * tail;
}

WeightSplit kernel_weight_split(const Eigen::VectorXd& errors, int alpha, int beta,
                                const KernelParams& p) {
  if (alpha < 0 || beta < 0 || errors.size() != alpha + beta) {
    throw DimensionMismatch("kernel_weight_split: residual length must equal alpha + beta");
  }
  WeightSplit out;
  out.state.resize(alpha);
  out.meas.resize(beta);
  for (int i = 0; i < alpha; ++i) out.state[i] = kernel_weight(errors[i], p);
  for (int i = 0; i < beta; ++i) out.meas[i] = kernel_weight(errors[alpha + i], p);
  return out;
}

}  // namespace wasse
