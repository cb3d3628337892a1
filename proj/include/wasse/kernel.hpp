#pragma once

#include <Eigen/Dense>

namespace wasse {

/// Generalized Student's t correntropy kernel.
///
/// S(e) = (1 + |e|^xi / (c * gamma^2))^(-(c + xi)/xi)
///
/// `denominator` selects the bandwidth term: the default uses gamma^2; the
/// alternative gamma^xi variant is kept behind the switch for comparison runs.
struct KernelParams {
  double c = 2.0;       ///< shape (c -> inf recovers the Gaussian kernel at xi = 2)
  double gamma = 12.0;  ///< bandwidth
  double xi = 1.9;      ///< exponent
  enum class Denominator { GammaSq, GammaXi };
  Denominator denominator = Denominator::GammaSq;
};

/// Kernel evaluated at a scalar residual magnitude (e >= 0 expected; |e| used).
double kernel_value(double e, const KernelParams& p);

/// Sum of kernel values over a residual vector; the quantity the robust
/// correction step maximizes.
double kernel_cost(const Eigen::VectorXd& errors, const KernelParams& p);

/// Influence weight for one residual:
///   Psi(e) = max(|e|, 1e-6)^(xi-2) * (1 + |e|^xi / denom)^(-(c + 2 xi)/xi)
/// The floor keeps xi < 2 from blowing up at tiny residuals; only relative
/// weights matter downstream (a common scalar cancels in the gain).
double kernel_weight(double e, const KernelParams& p);

/// Diagonal weight blocks for the augmented residual: the first `alpha`
/// entries weight the state block, the remaining `beta` the measurement block.
struct WeightSplit {
  Eigen::VectorXd state;  ///< alpha entries
  Eigen::VectorXd meas;   ///< beta entries
};
WeightSplit kernel_weight_split(const Eigen::VectorXd& errors, int alpha, int beta,
                                const KernelParams& p);

}  // namespace wasse
