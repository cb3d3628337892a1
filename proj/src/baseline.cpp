#include "wasse/baseline.hpp"

#include "wasse/errors.hpp"
#include "wasse/linalg.hpp"

namespace wasse {

BaselineState baseline_init(const RegionModel& region, double init_P) {
  if (!(init_P > 0.0)) throw ConfigError("baseline_init: init_P must be positive");
  BaselineState st;
  st.v = region.steady_state;
  st.P = init_P * Eigen::MatrixXd::Identity(region.alpha(), region.alpha());
  return st;
}

BaselineState ukf_step(const BaselineState& prev, const RegionModel& region,
                       const Eigen::VectorXd& z, const Eigen::MatrixXd& R,
                       const UtParams& ut) {
  const int beta = region.beta();
  if (z.size() != beta || R.rows() != beta || R.cols() != beta) {
    throw DimensionMismatch("ukf_step: measurement dimension mismatch");
  }
  const UtWeights w = ut_weights(region.alpha(), ut);
  const Prediction pred = predict(prev.v, prev.P, region, w);
  const Eigen::MatrixXd P_pred = guard_spd(symmetrized(pred.cov_raw));

  const MeasurementModel model = region_measurement_model(region);
  const MeasPrediction mp = predict_measurement(pred.mean, P_pred, model, w);
  const Linearization lin = statistical_linearize(mp.Pvz, P_pred, mp.Pzz);

  const Eigen::MatrixXd S = symmetrized(mp.Pzz + R);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw SingularInnovation("ukf_step: innovation covariance not positive definite");
  }
  const Eigen::MatrixXd K = llt.solve(mp.Pvz.transpose()).transpose();

  BaselineState next;
  next.v = pred.mean + K * (z - mp.zhat);
  next.P = guard_spd(update_posterior_covariance(P_pred, K, lin.H, R, lin.Ebar));
  return next;
}

}  // namespace wasse
