#include "wasse/noise.hpp"

#include <cmath>
#include <numbers>

#include "wasse/errors.hpp"

namespace wasse {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = master_seed;
  // Fold each path element into the key; an empty element list is legal.
  std::uint64_t acc = key;
  (void)splitmix64(acc);
  for (std::uint64_t p : path) {
    acc ^= p + 0x9E3779B97F4A7C15ULL + (acc << 6) + (acc >> 2);
    (void)splitmix64(acc);
  }
  for (auto& word : s_) word = splitmix64(acc);
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

double RngStream::laplace(double mean, double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double u = uniform() - 0.5;
  const double sign = (u < 0.0) ? -1.0 : 1.0;
  return mean - scale * sign * std::log1p(-2.0 * std::abs(u));
}

NoiseSpec::NoiseSpec(std::vector<NoiseComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("noise spec needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.weight < 0.0) throw ConfigError("noise component weight must be >= 0");
    if (!(c.variance > 0.0)) throw ConfigError("noise component variance must be > 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("noise component weights must sum to 1");
  }
}

NoiseSpec NoiseSpec::gaussian(double mean, double variance) {
  return NoiseSpec({NoiseComponent{1.0, NoiseComponent::Kind::Gaussian, mean, variance}});
}

double NoiseSpec::mixture_mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double NoiseSpec::mixture_variance() const {
  const double m = mixture_mean();
  double second = 0.0;
  for (const auto& c : components_) second += c.weight * (c.variance + c.mean * c.mean);
  return second - m * m;
}

double sample_scalar(const NoiseSpec& spec, RngStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  const auto& comps = spec.components();
  const NoiseComponent* pick = &comps.back();
  for (const auto& c : comps) {
    cum += c.weight;
    if (u < cum) {
      pick = &c;
      break;
    }
  }
  if (pick->kind == NoiseComponent::Kind::Gaussian) {
    return pick->mean + std::sqrt(pick->variance) * rng.normal();
  }
  return rng.laplace(pick->mean, pick->variance);
}

Eigen::VectorXd sample(const NoiseSpec& spec, int dim, RngStream& rng) {
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) out[i] = sample_scalar(spec, rng);
  return out;
}

Eigen::VectorXd sample_gaussian_vector(const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov, RngStream& rng) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
    throw DimensionMismatch("sample_gaussian_vector: covariance/mean size mismatch");
  }
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff())) {
    throw NotPositiveDefinite("sample_gaussian_vector: covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("sample_gaussian_vector: covariance is not positive definite");
  }
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + Eigen::MatrixXd(llt.matrixL()) * z;
}

}  // namespace wasse
