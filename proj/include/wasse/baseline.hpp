#pragma once

#include <Eigen/Dense>

#include "wasse/grid_model.hpp"
#include "wasse/vb_ukf.hpp"

namespace wasse {

/// Non-robust sigma-point filter with a fixed measurement covariance.  Shares
/// the prediction, statistical linearization, and Joseph-form covariance
/// update with the robust estimator so the two differ only in the correction
/// weighting and the covariance adaptation.
struct BaselineState {
  Eigen::VectorXd v;
  Eigen::MatrixXd P;
};

/// Initial baseline state: steady-state mean with an isotropic covariance.
BaselineState baseline_init(const RegionModel& region, double init_P = 1e-2);

/// One predict/correct cycle with measurement covariance R held fixed.
BaselineState ukf_step(const BaselineState& prev, const RegionModel& region,
                       const Eigen::VectorXd& z, const Eigen::MatrixXd& R,
                       const UtParams& ut = {});

}  // namespace wasse
