#include "wasse/linalg.hpp"

#include <cmath>

#include "wasse/errors.hpp"

namespace wasse {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

CholeskyResult safe_cholesky(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("safe_cholesky: matrix is not square");
  }
  const Eigen::MatrixXd sym = symmetrized(m);
  if (sym.norm() == 0.0) {
    // Zero covariance is a legal degenerate limit; its factor is zero.
    return {Eigen::MatrixXd::Zero(m.rows(), m.cols()), 0};
  }
  const double dim = static_cast<double>(m.rows());
  const double trace = sym.trace();
  const double base = 1e-12 * (trace > 0.0 ? trace / dim : 1.0);

  double jitter = 0.0;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    Eigen::MatrixXd trial = sym;
    if (jitter > 0.0) {
      trial += jitter * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      return {llt.matrixL(), attempt};
    }
    jitter = (attempt == 0) ? base : jitter * 10.0;
  }
  throw CholeskyFailure("safe_cholesky: matrix not positive definite after 6 jitter escalations");
}

Eigen::MatrixXd eigenvalue_floor(const Eigen::MatrixXd& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m));
  if (es.info() != Eigen::Success) {
    throw CholeskyFailure("eigenvalue_floor: eigendecomposition failed");
  }
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(floor);
  return symmetrized(es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose());
}

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) { return eigenvalue_floor(m, 0.0); }

Eigen::MatrixXd guard_spd(const Eigen::MatrixXd& m, double floor) {
  return eigenvalue_floor(m, floor);
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, int* jitter_events) {
  auto chol = safe_cholesky(m);
  if (jitter_events != nullptr) *jitter_events += chol.jitter_attempts;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd linv =
      chol.L.triangularView<Eigen::Lower>().solve(eye);
  return symmetrized(linv.transpose() * linv);
}

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  auto chol = safe_cholesky(m);
  Eigen::VectorXd y = chol.L.triangularView<Eigen::Lower>().solve(b);
  return chol.L.transpose().triangularView<Eigen::Upper>().solve(y);
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace wasse
