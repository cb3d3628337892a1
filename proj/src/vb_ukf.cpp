#include "wasse/vb_ukf.hpp"

#include <cmath>

#include "wasse/errors.hpp"
#include "wasse/linalg.hpp"

namespace wasse {

namespace {

void validate_settings(const VbSettings& vb, const CorrectionSettings& corr) {
  if (vb.iterations < 1) throw ConfigError("vb.iterations must be >= 1");
  if (!(vb.varsigma > 0.0 && vb.varsigma < 1.0)) {
    throw ConfigError("vb.varsigma must lie in (0, 1)");
  }
  if (!(vb.zeta > 0.0 && vb.zeta <= 1.0)) throw ConfigError("vb.zeta must lie in (0, 1]");
  if (corr.max_iter < 1) throw ConfigError("correction.max_iter must be >= 1");
  if (!(corr.tol > 0.0)) throw ConfigError("correction.tol must be positive");
}

}  // namespace

UtWeights ut_weights(int n, const UtParams& p) {
  if (n <= 0) throw DimensionMismatch("ut_weights: dimension must be positive");
  const double lam2 = p.lambda * p.lambda;
  const double scale = lam2 * (n + p.eta);  // n + phi
  if (!(scale > 0.0)) {
    throw DegenerateSpread("ut_weights: lambda^2 (n + eta) must be positive");
  }
  const double phi = scale - n;
  UtWeights w;
  w.n = n;
  w.scale = scale;
  w.wv.setConstant(2 * n + 1, 1.0 / (2.0 * scale));
  w.wc = w.wv;
  w.wv[0] = phi / scale;
  w.wc[0] = phi / scale + 1.0 + p.tau - lam2;
  return w;
}

Eigen::MatrixXd sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                             const UtWeights& w, int* jitter_events) {
  if (mean.size() != w.n || cov.rows() != w.n || cov.cols() != w.n) {
    throw DimensionMismatch("sigma_points: mean/cov dimension mismatch");
  }
  auto chol = safe_cholesky(cov);
  if (jitter_events != nullptr) *jitter_events += chol.jitter_attempts;
  const double s = std::sqrt(w.scale);
  Eigen::MatrixXd pts(w.n, 2 * w.n + 1);
  pts.col(0) = mean;
  for (int i = 0; i < w.n; ++i) {
    pts.col(1 + i) = mean + s * chol.L.col(i);
    pts.col(1 + w.n + i) = mean - s * chol.L.col(i);
  }
  return pts;
}

MeasurementModel region_measurement_model(const RegionModel& region) {
  const RegionModel* r = &region;
  return {r->beta(), [r](const Eigen::VectorXd& v) { return r->measure(v); }};
}

Prediction predict(const Eigen::VectorXd& v, const Eigen::MatrixXd& P, const RegionModel& region,
                   const UtWeights& w, int* jitter_events) {
  const Eigen::MatrixXd pts = sigma_points(v, P, w, jitter_events);
  Eigen::MatrixXd prop(pts.rows(), pts.cols());
  const Eigen::VectorXd drift = region.G * region.steady_state;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    prop.col(i) = region.F * pts.col(i) + drift;
  }
  Prediction out;
  out.mean = prop * w.wv;
  out.cov_raw = region.Q;
  for (Eigen::Index i = 0; i < prop.cols(); ++i) {
    const Eigen::VectorXd d = prop.col(i) - out.mean;
    out.cov_raw += w.wc[i] * d * d.transpose();
  }
  return out;
}

IwState vb_prior(const Eigen::MatrixXd& pred_cov_raw, const IwState& prev, int beta,
                 double varsigma, double zeta) {
  if (pred_cov_raw.rows() != pred_cov_raw.cols()) {
    throw DimensionMismatch("vb_prior: predicted covariance must be square");
  }
  if (!(varsigma > 0.0 && varsigma < 1.0)) throw ConfigError("vb_prior: varsigma in (0, 1)");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ConfigError("vb_prior: zeta in (0, 1]");
  IwState out;
  out.delta = static_cast<double>(pred_cov_raw.rows()) + varsigma + 1.0;
  out.Delta = varsigma * symmetrized(pred_cov_raw);
  out.iota = zeta * (prev.iota - beta - 1.0) + beta + 1.0;
  out.Iota = zeta * prev.Iota;
  return out;
}

MeasPrediction predict_measurement(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                   const MeasurementModel& model, const UtWeights& w,
                                   int* jitter_events) {
  MeasPrediction out;
  out.points = sigma_points(mean, cov, w, jitter_events);
  Eigen::MatrixXd Z(model.dim, out.points.cols());
  for (Eigen::Index i = 0; i < out.points.cols(); ++i) {
    Eigen::VectorXd zi = model.h(out.points.col(i));
    if (zi.size() != model.dim) {
      throw DimensionMismatch("predict_measurement: measurement map returned wrong dimension");
    }
    Z.col(i) = zi;
  }
  out.zhat = Z * w.wv;
  out.Pvz = Eigen::MatrixXd::Zero(mean.size(), model.dim);
  out.Pzz = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (Eigen::Index i = 0; i < out.points.cols(); ++i) {
    const Eigen::VectorXd dv = out.points.col(i) - mean;
    const Eigen::VectorXd dz = Z.col(i) - out.zhat;
    out.Pvz += w.wc[i] * dv * dz.transpose();
    out.Pzz += w.wc[i] * dz * dz.transpose();
  }
  return out;
}

PUpdate vb_update_P(const IwState& priors, const Eigen::MatrixXd& posterior_points,
                    const Eigen::VectorXd& weights, const Eigen::VectorXd& pred_mean) {
  const Eigen::Index alpha = posterior_points.rows();
  if (pred_mean.size() != alpha || priors.Delta.rows() != alpha ||
      weights.size() != posterior_points.cols()) {
    throw DimensionMismatch("vb_update_P: dimension mismatch");
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(alpha, alpha);
  for (Eigen::Index i = 0; i < posterior_points.cols(); ++i) {
    const Eigen::VectorXd d = pred_mean - posterior_points.col(i);
    M += weights(i) * (d * d.transpose());
  }

  PUpdate out;
  out.delta = priors.delta + 1.0;
  out.Delta = priors.Delta + M;
  const double dof = out.delta - static_cast<double>(alpha) - 1.0;
  if (!(dof > 0.0)) throw DofUnderflow("vb_update_P: delta leaves no degrees of freedom");
  out.mean = symmetrized(out.Delta / dof);
  return out;
}

RUpdate vb_update_R(const IwState& priors, const Eigen::MatrixXd& posterior_points,
                    const Eigen::VectorXd& weights, const MeasurementModel& model,
                    const Eigen::VectorXd& z) {
  if (z.size() != model.dim || priors.Iota.rows() != model.dim ||
      weights.size() != posterior_points.cols()) {
    throw DimensionMismatch("vb_update_R: dimension mismatch");
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (Eigen::Index i = 0; i < posterior_points.cols(); ++i) {
    const Eigen::VectorXd d = z - model.h(posterior_points.col(i));
    A += weights(i) * (d * d.transpose());
  }

  RUpdate out;
  out.iota = priors.iota + 1.0;
  out.Iota = priors.Iota + A;
  const double dof = out.iota - static_cast<double>(model.dim) - 1.0;
  if (!(dof > 0.0)) throw DofUnderflow("vb_update_R: iota leaves no degrees of freedom");
  out.mean = symmetrized(out.Iota / dof);
  return out;
}

Linearization statistical_linearize(const Eigen::MatrixXd& Pvz, const Eigen::MatrixXd& Ppred,
                                    const Eigen::MatrixXd& Pzz, int* jitter_events) {
  if (Pvz.rows() != Ppred.rows() || Pzz.rows() != Pvz.cols()) {
    throw DimensionMismatch("statistical_linearize: dimension mismatch");
  }
  const Eigen::MatrixXd Pinv = spd_inverse(Ppred, jitter_events);
  Linearization out;
  out.H = Pvz.transpose() * Pinv;
  out.Ebar = clip_psd(Pzz - Pvz.transpose() * Pinv * Pvz);
  return out;
}

CorrectionResult robust_correct(const Eigen::VectorXd& v_pred, const Eigen::MatrixXd& P_pred,
                                const Eigen::MatrixXd& R, const Eigen::MatrixXd& Ebar,
                                const Eigen::MatrixXd& H, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& zhat, const KernelParams& kernel,
                                const CorrectionSettings& settings, int* jitter_events) {
  const int alpha = static_cast<int>(v_pred.size());
  const int beta = static_cast<int>(z.size());
  if (H.rows() != beta || H.cols() != alpha || R.rows() != beta || Ebar.rows() != beta ||
      zhat.size() != beta || P_pred.rows() != alpha) {
    throw DimensionMismatch("robust_correct: dimension mismatch");
  }

  auto sp = safe_cholesky(P_pred);
  auto sr = safe_cholesky(R + Ebar);
  if (jitter_events != nullptr) *jitter_events += sp.jitter_attempts + sr.jitter_attempts;

  // Whitened augmented model: lam = Shat^-1 [v_pred; z + H v_pred - zhat],
  // Hhat = Shat^-1 [I; H] with Shat = blkdiag(SP, SR).
  const Eigen::VectorXd innovation = z - zhat;
  Eigen::VectorXd lam(alpha + beta);
  lam.head(alpha) = sp.L.triangularView<Eigen::Lower>().solve(v_pred);
  lam.tail(beta) = sr.L.triangularView<Eigen::Lower>().solve(z + H * v_pred - zhat);
  Eigen::MatrixXd Hhat(alpha + beta, alpha);
  Hhat.topRows(alpha) = sp.L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(alpha, alpha));
  Hhat.bottomRows(beta) = sr.L.triangularView<Eigen::Lower>().solve(H);

  constexpr double kWeightFloor = 1e-8;
  CorrectionResult out;
  out.v = v_pred;
  out.min_weight = 1.0;
  for (int it = 1; it <= settings.max_iter; ++it) {
    Eigen::VectorXd psi_p, psi_r;
    if (settings.force_uniform_weights) {
      psi_p = Eigen::VectorXd::Ones(alpha);
      psi_r = Eigen::VectorXd::Ones(beta);
    } else {
      const Eigen::VectorXd e = lam - Hhat * out.v;
      WeightSplit split = kernel_weight_split(e, alpha, beta, kernel);
      psi_p = split.state;
      psi_r = split.meas;
      const double mn = std::min(psi_p.minCoeff(), psi_r.minCoeff());
      out.min_weight = std::min(out.min_weight, mn);
    }
    psi_p = psi_p.cwiseMax(kWeightFloor);
    psi_r = psi_r.cwiseMax(kWeightFloor);
    Eigen::VectorXd wp, wr;
    if (settings.weight_form == CorrectionSettings::WeightForm::Inverse) {
      wp = psi_p.cwiseInverse();
      wr = psi_r.cwiseInverse();
    } else {
      wp = psi_p;
      wr = psi_r;
    }
    const Eigen::MatrixXd Pt = sp.L * wp.asDiagonal() * sp.L.transpose();
    const Eigen::MatrixXd Rt = sr.L * wr.asDiagonal() * sr.L.transpose();
    const Eigen::MatrixXd S = symmetrized(H * Pt * H.transpose() + Rt);
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      throw SingularInnovation("robust_correct: innovation covariance not positive definite");
    }
    const Eigen::MatrixXd K = llt.solve(H * Pt.transpose()).transpose();
    const Eigen::VectorXd v_new = v_pred + K * innovation;
    out.gain = K;
    out.iterations = it;
    const double resid = (v_new - out.v).norm();
    out.v = v_new;
    if (resid < settings.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

Eigen::MatrixXd update_posterior_covariance(const Eigen::MatrixXd& P_pred,
                                            const Eigen::MatrixXd& K, const Eigen::MatrixXd& H,
                                            const Eigen::MatrixXd& R,
                                            const Eigen::MatrixXd& Ebar) {
  if (K.rows() != P_pred.rows() || H.cols() != P_pred.cols() || K.cols() != H.rows()) {
    throw DimensionMismatch("update_posterior_covariance: dimension mismatch");
  }
  const Eigen::MatrixXd ikh =
      Eigen::MatrixXd::Identity(P_pred.rows(), P_pred.cols()) - K * H;
  return symmetrized(ikh * P_pred * ikh.transpose() + K * (R + Ebar) * K.transpose());
}

InformationForm to_information(const Eigen::VectorXd& v, const Eigen::MatrixXd& P) {
  InformationForm out;
  out.C = spd_inverse(P);
  out.chi = out.C * v;
  return out;
}

EstimatorState init_state(const RegionModel& region, const EstimatorConfig& cfg) {
  validate_settings(cfg.vb, cfg.correction);
  if (!(cfg.init_P > 0.0) || !(cfg.init_R_nominal > 0.0)) {
    throw ConfigError("init_P and init_R_nominal must be positive");
  }
  const int alpha = region.alpha();
  const int beta = region.beta();
  EstimatorState st;
  st.v = region.steady_state;
  st.P = cfg.init_P * Eigen::MatrixXd::Identity(alpha, alpha);
  st.iw.delta = alpha + cfg.vb.varsigma + 1.0;
  st.iw.Delta = cfg.vb.varsigma * st.P;
  st.iw.iota = beta + 2.0;
  st.iw.Iota = cfg.init_R_nominal * Eigen::MatrixXd::Identity(beta, beta);
  const auto info = to_information(st.v, st.P);
  st.chi = info.chi;
  st.C = info.C;
  st.prior_v = st.v;
  st.prior_P = st.P;
  st.prior_sigma_points = sigma_points(st.v, st.P, ut_weights(alpha, cfg.ut));
  st.cross_Pvz = Eigen::MatrixXd::Zero(alpha, beta);
  st.pred_z = region.measure(st.v);
  st.R_est = cfg.init_R_nominal * Eigen::MatrixXd::Identity(beta, beta);
  return st;
}

EstimatorState local_step(const EstimatorState& prev, const RegionModel& region,
                          const Eigen::VectorXd& z, const EstimatorConfig& cfg,
                          StepDiagnostics* diag) {
  validate_settings(cfg.vb, cfg.correction);
  const int alpha = region.alpha();
  const int beta = region.beta();
  if (z.size() != beta) {
    throw DimensionMismatch("local_step: frame has " + std::to_string(z.size()) +
                            " channels, region expects " + std::to_string(beta));
  }
  for (int i = 0; i < beta; ++i) {
    if (!std::isfinite(z[i])) {
      throw Error("local_step: non-finite measurement at channel " + std::to_string(i));
    }
  }

  int jitter = 0;
  const UtWeights w = ut_weights(alpha, cfg.ut);
  const MeasurementModel model = region_measurement_model(region);

  const Prediction pred = predict(prev.v, prev.P, region, w, &jitter);
  const Eigen::MatrixXd pred_cov = symmetrized(pred.cov_raw);
  const Eigen::MatrixXd pred_cov_guarded = guard_spd(pred_cov);

  IwState priors;
  if (cfg.vb.enabled) {
    priors = vb_prior(pred_cov, prev.iw, beta, cfg.vb.varsigma, cfg.vb.zeta);
  }

  Eigen::VectorXd v_cur = pred.mean;
  Eigen::MatrixXd P_cur = pred_cov_guarded;   // iterate-0 posterior
  Eigen::MatrixXd P_vb = pred_cov_guarded;    // current predicted-covariance mean
  Eigen::MatrixXd R_cur = prev.R_est;
  Eigen::MatrixXd R_prev = R_cur;
  IwState iw_post = prev.iw;

  MeasPrediction mp;
  StepDiagnostics local_diag;
  for (int j = 1; j <= cfg.vb.iterations; ++j) {
    if (cfg.vb.enabled) {
      const Eigen::MatrixXd& sigma_cov = cfg.vb.sigma_from_posterior ? P_cur : P_vb;
      const Eigen::MatrixXd pts_post = sigma_points(v_cur, sigma_cov, w, &jitter);
      const PUpdate pu = vb_update_P(priors, pts_post, w.wv, pred.mean);
      const RUpdate ru = vb_update_R(priors, pts_post, w.wv, model, z);
      P_vb = guard_spd(pu.mean);
      R_cur = guard_spd(ru.mean);
      iw_post.delta = pu.delta;
      iw_post.Delta = pu.Delta;
      iw_post.iota = ru.iota;
      iw_post.Iota = ru.Iota;
    }

    mp = predict_measurement(pred.mean, P_vb, model, w, &jitter);
    const Linearization lin = statistical_linearize(mp.Pvz, P_vb, mp.Pzz, &jitter);
    const CorrectionResult corr =
        robust_correct(pred.mean, P_vb, R_cur, lin.Ebar, lin.H, z, mp.zhat, cfg.kernel,
                       cfg.correction, &jitter);
    const Eigen::MatrixXd P_new =
        guard_spd(update_posterior_covariance(P_vb, corr.gain, lin.H, R_cur, lin.Ebar));

    const double state_resid = (corr.v - v_cur).norm();
    v_cur = corr.v;
    P_cur = P_new;
    local_diag.vb_iterations = j;
    local_diag.fp_iterations += corr.iterations;
    local_diag.converged = local_diag.converged && corr.converged;
    local_diag.min_weight = std::min(local_diag.min_weight, corr.min_weight);

    if (cfg.vb.enabled && j < cfg.vb.iterations) {
      const double r_rel =
          (R_cur - R_prev).norm() / std::max(R_cur.norm(), 1e-300);
      if (state_resid < cfg.vb.early_exit_tol && r_rel < cfg.vb.early_exit_tol) break;
    }
    R_prev = R_cur;
  }

  EstimatorState next;
  next.v = v_cur;
  next.P = P_cur;
  next.iw = cfg.vb.enabled ? iw_post : prev.iw;
  const auto info = to_information(next.v, next.P);
  next.chi = info.chi;
  next.C = info.C;
  next.prior_v = pred.mean;
  next.prior_P = P_vb;
  next.prior_sigma_points = mp.points;
  next.cross_Pvz = mp.Pvz;
  next.pred_z = mp.zhat;
  next.R_est = R_cur;

  local_diag.jitter_events = jitter;
  if (diag != nullptr) *diag = local_diag;
  return next;
}

}  // namespace wasse
