#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace wasse {

/// Deterministic counter-based random substream.
///
/// A stream is addressed by a master seed plus an integer path, e.g.
/// (run, region, step, channel). Streams with different paths are independent;
/// the same (seed, path) always reproduces the same draws regardless of thread
/// count or creation order. Internals: splitmix64 key mixing feeding
/// xoshiro256++, uniform doubles from the top 53 bits.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal via Box-Muller (second value cached).
  double normal();
  /// Laplace with mean a and *variance* b (scale = sqrt(b/2)).
  double laplace(double mean, double variance);

 private:
  std::uint64_t s_[4];
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// One component of a scalar noise mixture.
struct NoiseComponent {
  enum class Kind { Gaussian, Laplace };
  double weight = 1.0;
  Kind kind = Kind::Gaussian;
  double mean = 0.0;
  double variance = 1.0;
};

/// Finite mixture of Gaussian/Laplace components, e.g.
/// 0.01*N(0,1000) + 0.99*N(0,1). Invariants (weights >= 0 summing to 1,
/// variances > 0) are enforced at construction.
class NoiseSpec {
 public:
  explicit NoiseSpec(std::vector<NoiseComponent> components);
  static NoiseSpec gaussian(double mean, double variance);

  const std::vector<NoiseComponent>& components() const { return components_; }
  double mixture_mean() const;
  double mixture_variance() const;

 private:
  std::vector<NoiseComponent> components_;
};

/// One scalar draw from the mixture.
double sample_scalar(const NoiseSpec& spec, RngStream& rng);

/// dim i.i.d. draws from the mixture.
Eigen::VectorXd sample(const NoiseSpec& spec, int dim, RngStream& rng);

/// Multivariate Gaussian draw via the Cholesky factor of `cov`.
/// Throws NotPositiveDefinite for non-symmetric or non-PD covariance.
Eigen::VectorXd sample_gaussian_vector(const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov, RngStream& rng);

}  // namespace wasse
