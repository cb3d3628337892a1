#pragma once

#include <Eigen/Dense>

namespace wasse {

/// 0.5 * (M + M^T).
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

/// Lower-triangular Cholesky factor with an escalating-jitter safeguard.
///
/// The input is symmetrized first. If plain LLT fails, j*I is added with
/// j = 1e-12 * trace/dim, escalating by x10 up to 6 times before throwing
/// CholeskyFailure. `jitter_attempts` reports how many retries were needed
/// (0 means the factorization succeeded untouched).
struct CholeskyResult {
  Eigen::MatrixXd L;
  int jitter_attempts = 0;
};
CholeskyResult safe_cholesky(const Eigen::MatrixXd& m);

/// Symmetric eigen-decomposition with eigenvalues clamped from below.
Eigen::MatrixXd eigenvalue_floor(const Eigen::MatrixXd& m, double floor);

/// Symmetrize and clip negative eigenvalues to zero (projection onto PSD cone).
Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m);

/// Symmetrize + eigenvalue floor; the standard guard applied to predicted
/// covariances before they are factorized or inverted.
Eigen::MatrixXd guard_spd(const Eigen::MatrixXd& m, double floor = 1e-10);

/// Inverse of an SPD matrix through the safeguarded Cholesky factor.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, int* jitter_events = nullptr);

/// Solve M x = b for SPD M through the safeguarded Cholesky factor.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b);

bool all_finite(const Eigen::MatrixXd& m);

}  // namespace wasse
