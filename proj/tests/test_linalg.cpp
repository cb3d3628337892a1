#include <Eigen/Dense>

#include "doctest.h"
#include "wasse/errors.hpp"
#include "wasse/linalg.hpp"
#include "wasse/noise.hpp"

using namespace wasse;

namespace {

Eigen::MatrixXd random_spd(int n, RngStream& rng, double scale = 1.0) {
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  return scale * (A * A.transpose()) + 1e-3 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("symmetrized averages the matrix with its transpose") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 4.0, 3.0;
  Eigen::MatrixXd s = symmetrized(m);
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK(s(1, 0) == doctest::Approx(3.0));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK((s - s.transpose()).norm() == 0.0);
}

TEST_CASE("safe_cholesky reproduces the plain factor on well-conditioned input") {
  RngStream rng(7, {1});
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd m = random_spd(5, rng);
    CholeskyResult r = safe_cholesky(m);
    CHECK(r.jitter_attempts == 0);
    CHECK((r.L * r.L.transpose() - m).norm() < 1e-10 * m.norm());
    // Lower triangular.
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) CHECK(r.L(i, j) == 0.0);
  }
}

TEST_CASE("safe_cholesky repairs a slightly indefinite matrix with jitter") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(2, 2) = -1e-14;  // tiny negative eigenvalue
  CholeskyResult r = safe_cholesky(m);
  CHECK(r.jitter_attempts >= 1);
  CHECK((r.L * r.L.transpose() - m).norm() < 1e-8);
}

TEST_CASE("safe_cholesky throws CholeskyFailure on a hopeless matrix") {
  Eigen::MatrixXd m = -Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(safe_cholesky(m), CholeskyFailure);
}

TEST_CASE("clip_psd zeroes negative eigenvalues and keeps PSD input intact") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.0, 0.0, -2.0;
  Eigen::MatrixXd c = clip_psd(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  CHECK(es.eigenvalues().minCoeff() >= -1e-15);
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(c(1, 1) == doctest::Approx(0.0));

  RngStream rng(11, {2});
  Eigen::MatrixXd spd = random_spd(4, rng);
  CHECK((clip_psd(spd) - spd).norm() < 1e-12 * spd.norm());
}

TEST_CASE("guard_spd floors eigenvalues from below") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd g = guard_spd(m, 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  CHECK(es.eigenvalues().minCoeff() >= 1e-8 - 1e-20);
}

TEST_CASE("spd_inverse and spd_solve agree with direct inversion") {
  RngStream rng(13, {3});
  Eigen::MatrixXd m = random_spd(6, rng);
  Eigen::MatrixXd inv = spd_inverse(m);
  CHECK((m * inv - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-9);

  Eigen::VectorXd b(6);
  for (int i = 0; i < 6; ++i) b(i) = rng.normal();
  Eigen::VectorXd x = spd_solve(m, b);
  CHECK((m * x - b).norm() < 1e-9 * b.norm());
}

TEST_CASE("all_finite detects NaN and infinity") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  CHECK(all_finite(m));
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(m));
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(all_finite(m));
}
