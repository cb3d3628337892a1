#pragma once

#include <functional>

#include <Eigen/Dense>

#include "wasse/grid_model.hpp"
#include "wasse/kernel.hpp"

namespace wasse {

/// Unscented-transform spread parameters. phi = lambda^2 (n + eta) - n; the
/// sigma points sit at mean +/- sqrt(n + phi) * chol(P) columns.
struct UtParams {
  double lambda = 1.0;
  double eta = 2.0;
  double tau = 1.0;
};

/// Weights for a given state dimension n: one mean/covariance weight pair for
/// the center point plus a shared weight for the 2n symmetric points.
struct UtWeights {
  int n = 0;
  double scale = 0.0;  ///< n + phi (spread^2)
  Eigen::VectorXd wv;  ///< 2n+1 mean weights
  Eigen::VectorXd wc;  ///< 2n+1 covariance weights
};

/// Throws DegenerateSpread when n + phi <= 0.
UtWeights ut_weights(int n, const UtParams& p);

/// 2n+1 sigma points as columns: [mean, mean + s*L_i, mean - s*L_i] with
/// s = sqrt(scale) and L the safeguarded Cholesky factor of cov.
Eigen::MatrixXd sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                             const UtWeights& w, int* jitter_events = nullptr);

/// Generic measurement map used by the estimator (lets tests substitute
/// arbitrary functions for the grid channels).
struct MeasurementModel {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
};
MeasurementModel region_measurement_model(const RegionModel& region);

/// Time update through the region dynamics; covariance returned raw (caller
/// decides how to safeguard).
struct Prediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_raw;
};
Prediction predict(const Eigen::VectorXd& v, const Eigen::MatrixXd& P, const RegionModel& region,
                   const UtWeights& w, int* jitter_events = nullptr);

/// Inverse-Wishart sufficient statistics for the predicted state covariance
/// (delta, Delta) and the measurement noise (iota, Iota).
struct IwState {
  double delta = 0.0;
  Eigen::MatrixXd Delta;
  double iota = 0.0;
  Eigen::MatrixXd Iota;
};

struct VbSettings {
  double varsigma = 0.95;  ///< P-side spread factor in (0, 1)
  double zeta = 0.97;      ///< R-side forgetting factor in (0, 1]
  int iterations = 3;      ///< J >= 1
  bool enabled = true;     ///< false = fixed measurement noise, no adaptation
  double early_exit_tol = 1e-6;
  /// Sigma source for the in-loop statistics: true = corrected posterior of
  /// the previous iterate (default), false = the current variational mean.
  bool sigma_from_posterior = true;
};

/// One-step priors: delta^- = alpha + varsigma + 1, Delta^- = varsigma * P_pred_raw,
/// iota^- = zeta (iota - beta - 1) + beta + 1, Iota^- = zeta * Iota.
IwState vb_prior(const Eigen::MatrixXd& pred_cov_raw, const IwState& prev, int beta,
                 double varsigma, double zeta);

/// Measurement-side unscented statistics evaluated at (mean, cov).
struct MeasPrediction {
  Eigen::VectorXd zhat;
  Eigen::MatrixXd Pvz;  ///< alpha x beta cross covariance
  Eigen::MatrixXd Pzz;  ///< beta x beta spread (no measurement noise added)
  Eigen::MatrixXd points;  ///< the sigma points used (alpha x 2alpha+1)
};
MeasPrediction predict_measurement(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                   const MeasurementModel& model, const UtWeights& w,
                                   int* jitter_events = nullptr);

/// P-side variational refresh. The scatter M is the mean-weighted spread of
/// the posterior sigma points around the predicted mean — the discrete
/// expectation of (pred_mean - v)(pred_mean - v)^T under the UT measure, so
/// for exact sigma points M = P_post + (pred_mean - v_post)(...)^T.
/// `weights` holds one UT mean weight per sigma point (column). Throws
/// DofUnderflow when the posterior dof cannot support a mean.
struct PUpdate {
  double delta = 0.0;
  Eigen::MatrixXd Delta;
  Eigen::MatrixXd mean;  ///< Delta / (delta - alpha - 1), symmetrized
};
PUpdate vb_update_P(const IwState& priors, const Eigen::MatrixXd& posterior_points,
                    const Eigen::VectorXd& weights, const Eigen::VectorXd& pred_mean);

/// R-side variational refresh: mean-weighted scatter of z - h(sigma point),
/// the discrete expectation of the squared residual under the UT measure.
/// With that weighting the true measurement covariance is a fixed point of
/// the adaptation; a uniform average over-weights the sigma spread and the
/// estimate drifts to the H P H^T scale instead.
struct RUpdate {
  double iota = 0.0;
  Eigen::MatrixXd Iota;
  Eigen::MatrixXd mean;  ///< Iota / (iota - beta - 1), symmetrized
};
RUpdate vb_update_R(const IwState& priors, const Eigen::MatrixXd& posterior_points,
                    const Eigen::VectorXd& weights, const MeasurementModel& model,
                    const Eigen::VectorXd& z);

/// Statistical linearization H = Pvz^T Ppred^-1 and the residual spread
/// Ebar = Pzz - Pvz^T Ppred^-1 Pvz clipped onto the PSD cone.
struct Linearization {
  Eigen::MatrixXd H;
  Eigen::MatrixXd Ebar;
};
Linearization statistical_linearize(const Eigen::MatrixXd& Pvz, const Eigen::MatrixXd& Ppred,
                                    const Eigen::MatrixXd& Pzz, int* jitter_events = nullptr);

struct CorrectionSettings {
  int max_iter = 50;
  double tol = 1e-6;
  /// Apply the diagonal weights inverted inside the modified covariances
  /// (default) or as printed (non-inverted) for comparison runs.
  enum class WeightForm { Inverse, Printed };
  WeightForm weight_form = WeightForm::Inverse;
  /// Force every weight to 1 (disables the robust reweighting entirely).
  bool force_uniform_weights = false;
};

/// Robust fixed-point correction on the augmented whitened model.
/// Returns the final iterate, the gain used on the last pass (for the Joseph
/// update), and convergence diagnostics. Throws SingularInnovation when the
/// innovation covariance cannot be factorized.
struct CorrectionResult {
  Eigen::VectorXd v;
  Eigen::MatrixXd gain;
  int iterations = 0;
  bool converged = false;
  double min_weight = 1.0;
};
CorrectionResult robust_correct(const Eigen::VectorXd& v_pred, const Eigen::MatrixXd& P_pred,
                                const Eigen::MatrixXd& R, const Eigen::MatrixXd& Ebar,
                                const Eigen::MatrixXd& H, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& zhat, const KernelParams& kernel,
                                const CorrectionSettings& settings,
                                int* jitter_events = nullptr);

/// Joseph-form posterior covariance (I-KH) P (I-KH)^T + K (R+Ebar) K^T.
Eigen::MatrixXd update_posterior_covariance(const Eigen::MatrixXd& P_pred,
                                            const Eigen::MatrixXd& K, const Eigen::MatrixXd& H,
                                            const Eigen::MatrixXd& R,
                                            const Eigen::MatrixXd& Ebar);

/// Information form chi = P^-1 v, C = P^-1.
struct InformationForm {
  Eigen::VectorXd chi;
  Eigen::MatrixXd C;
};
InformationForm to_information(const Eigen::VectorXd& v, const Eigen::MatrixXd& P);

struct EstimatorConfig {
  UtParams ut;
  KernelParams kernel;
  VbSettings vb;
  CorrectionSettings correction;
  double init_P = 1e-2;          ///< initial state covariance scale
  double init_R_nominal = 1e-3;  ///< initial noise-statistic scale / fixed R when VB off
};

/// Full filter state for one region, kept in both moment and information form.
struct EstimatorState {
  Eigen::VectorXd v;
  Eigen::MatrixXd P;
  IwState iw;
  Eigen::VectorXd chi;
  Eigen::MatrixXd C;
  // Prediction-side quantities cached for the fusion stage.
  Eigen::VectorXd prior_v;
  Eigen::MatrixXd prior_P;
  Eigen::MatrixXd prior_sigma_points;
  Eigen::MatrixXd cross_Pvz;
  Eigen::VectorXd pred_z;
  Eigen::MatrixXd R_est;
};

struct StepDiagnostics {
  int vb_iterations = 0;
  int fp_iterations = 0;
  bool converged = true;
  int jitter_events = 0;
  double min_weight = 1.0;
};

EstimatorState init_state(const RegionModel& region, const EstimatorConfig& cfg);

/// One complete local filtering step: predict, refresh the noise statistics,
/// robust-correct, and refresh the information form. `diag` is optional.
EstimatorState local_step(const EstimatorState& prev, const RegionModel& region,
                          const Eigen::VectorXd& z, const EstimatorConfig& cfg,
                          StepDiagnostics* diag = nullptr);

}  // namespace wasse
