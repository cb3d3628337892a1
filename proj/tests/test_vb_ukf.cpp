#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "wasse/case_parser.hpp"
#include "wasse/errors.hpp"
#include "wasse/grid_model.hpp"
#include "wasse/linalg.hpp"
#include "wasse/noise.hpp"
#include "wasse/truth_sim.hpp"
#include "wasse/vb_ukf.hpp"

using namespace wasse;

namespace {

Eigen::MatrixXd random_spd(int n, RngStream& rng, double scale = 1.0) {
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  return scale * (A * A.transpose()) + 1e-3 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vec(int n, RngStream& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

UtParams standard_regime() { return {1.0, 2.0, 1.0}; }  // lambda, eta, tau

}  // namespace

TEST_CASE("ut_weights closed forms") {
  SUBCASE("weights always sum to one on the mean side") {
    for (double lambda : {0.5, 1.0, std::exp(2.0)}) {
      for (double eta : {0.02, 2.0}) {
        UtWeights w = ut_weights(6, {lambda, eta, 1.0});
        CHECK(w.wv.sum() == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("hand-evaluated small case") {
    // alpha = 2, lambda = 1, eta = 0, tau = 1: phi = 0.
    UtWeights w = ut_weights(2, {1.0, 0.0, 1.0});
    CHECK(w.scale == doctest::Approx(2.0));
    CHECK(w.wv(0) == doctest::Approx(0.0));
    CHECK(w.wc(0) == doctest::Approx(1.0));  // 0 + 1 + tau - lambda^2 = 1
    for (int i = 1; i <= 4; ++i) {
      CHECK(w.wv(i) == doctest::Approx(0.25));
      CHECK(w.wc(i) == doctest::Approx(0.25));
    }
  }
  SUBCASE("large-spread parameterization is accepted with a negative center weight") {
    double lambda = std::exp(2.0);
    UtWeights w = ut_weights(10, {lambda, 0.02, 1.0});
    double phi = lambda * lambda * 10.02 - 10.0;
    CHECK(w.scale == doctest::Approx(10.0 + phi).epsilon(1e-12));
    CHECK(w.wc(0) == doctest::Approx(phi / (10.0 + phi) + 2.0 - std::exp(4.0)).epsilon(1e-12));
    CHECK(w.wc(0) < -50.0);
  }
  SUBCASE("non-positive squared spread rejected") {
    CHECK_THROWS_AS(ut_weights(2, {1.0, -3.0, 1.0}), DegenerateSpread);
  }
}

TEST_CASE("sigma_points geometry and moment reconstruction") {
  SUBCASE("unit case lands at mean +/- 1") {
    Eigen::VectorXd m(1);
    m << 3.0;
    UtWeights w = ut_weights(1, {1.0, 0.0, 1.0});  // scale = 1
    Eigen::MatrixXd pts = sigma_points(m, Eigen::MatrixXd::Identity(1, 1), w);
    REQUIRE(pts.cols() == 3);
    CHECK(pts(0, 0) == doctest::Approx(3.0));
    CHECK(pts(0, 1) == doctest::Approx(4.0));
    CHECK(pts(0, 2) == doctest::Approx(2.0));
  }
  SUBCASE("weighted mean and covariance reproduce the inputs") {
    RngStream rng(3, {0});
    for (int trial = 0; trial < 10; ++trial) {
      int n = 5;
      Eigen::VectorXd mean = random_vec(n, rng);
      Eigen::MatrixXd cov = random_spd(n, rng);
      UtWeights w = ut_weights(n, standard_regime());
      Eigen::MatrixXd pts = sigma_points(mean, cov, w);

      Eigen::VectorXd m_rec = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < pts.cols(); ++i) m_rec += w.wv(i) * pts.col(i);
      CHECK((m_rec - mean).norm() < 1e-12 * std::max(1.0, mean.norm()));

      Eigen::MatrixXd c_rec = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < pts.cols(); ++i) {
        Eigen::VectorXd d = pts.col(i) - mean;
        c_rec += w.wc(i) * d * d.transpose();
      }
      CHECK((c_rec - cov).norm() < 1e-12 * cov.norm());
    }
  }
}

TEST_CASE("predict is exact for the linear region dynamics") {
  PartitionedGrid g = build_partition(load_bundled("ieee14"), default_partition("ieee14"));
  const RegionModel& r = g.region(2);
  RngStream rng(5, {0});
  UtWeights w = ut_weights(r.alpha(), standard_regime());

  Eigen::VectorXd v = random_vec(r.alpha(), rng);
  Eigen::MatrixXd P = random_spd(r.alpha(), rng, 0.1);
  Prediction pred = predict(v, P, r, w);

  Eigen::VectorXd mean_expect = r.F * v + r.G * r.steady_state;
  Eigen::MatrixXd cov_expect = r.F * P * r.F.transpose() + r.Q;
  CHECK((pred.mean - mean_expect).norm() < 1e-10 * std::max(1.0, mean_expect.norm()));
  CHECK((pred.cov_raw - cov_expect).norm() < 1e-10 * cov_expect.norm());

  SUBCASE("identity prior covariance gives the scalar closed form") {
    Prediction p2 = predict(v, Eigen::MatrixXd::Identity(r.alpha(), r.alpha()), r, w);
    Eigen::MatrixXd expect = (0.89 * 0.89 + 1e-4) * Eigen::MatrixXd::Identity(r.alpha(), r.alpha());
    CHECK((p2.cov_raw - expect).norm() < 1e-10);
  }
  SUBCASE("vanishing prior covariance and process noise give a vanishing prediction") {
    ModelParams quiet;
    quiet.q_var = 1e-24;
    PartitionedGrid gq = build_partition(load_bundled("ieee14"), default_partition("ieee14"), quiet);
    Prediction p3 = predict(v, 1e-24 * Eigen::MatrixXd::Identity(r.alpha(), r.alpha()),
                            gq.region(2), w);
    CHECK(p3.cov_raw.norm() < 1e-6);
  }
}

TEST_CASE("vb_prior arithmetic") {
  IwState prev;
  prev.delta = 0.0;
  prev.Delta = Eigen::MatrixXd::Zero(2, 2);
  prev.iota = 10.0;
  prev.Iota = 3.0 * Eigen::MatrixXd::Identity(4, 4);

  SUBCASE("zeta = 1 keeps the measurement statistics") {
    IwState pri = vb_prior(Eigen::MatrixXd::Identity(2, 2), prev, 4, 0.5, 1.0);
    CHECK(pri.iota == doctest::Approx(10.0));
    CHECK((pri.Iota - prev.Iota).norm() == 0.0);
  }
  SUBCASE("printed forgetting example") {
    // zeta = 0.95, iota = 10, beta = 4: 0.95 * (10 - 5) + 5 = 9.75.
    IwState pri = vb_prior(Eigen::MatrixXd::Identity(2, 2), prev, 4, 0.5, 0.95);
    CHECK(pri.iota == doctest::Approx(9.75).epsilon(1e-12));
    CHECK((pri.Iota - 0.95 * prev.Iota).norm() < 1e-12);
  }
  SUBCASE("prior mean of the state-side IW recovers the nominal covariance") {
    // varsigma = 0.5, alpha = 2: delta^- = 3.5, Delta^- = 0.5 I, mean = I.
    IwState pri = vb_prior(Eigen::MatrixXd::Identity(2, 2), prev, 4, 0.5, 0.95);
    CHECK(pri.delta == doctest::Approx(3.5));
    CHECK((pri.Delta - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    Eigen::MatrixXd mean = pri.Delta / (pri.delta - 2.0 - 1.0);
    CHECK((mean - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("predict_measurement is exact for linear maps") {
  RngStream rng(7, {0});
  const int n = 4, mdim = 3;
  Eigen::MatrixXd H(mdim, n);
  for (int i = 0; i < mdim; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = rng.normal();
  MeasurementModel model{mdim, [H](const Eigen::VectorXd& v) { return (H * v).eval(); }};

  Eigen::VectorXd mean = random_vec(n, rng);
  Eigen::MatrixXd cov = random_spd(n, rng);
  UtWeights w = ut_weights(n, standard_regime());
  MeasPrediction mp = predict_measurement(mean, cov, model, w);

  CHECK((mp.zhat - H * mean).norm() < 1e-10 * std::max(1.0, (H * mean).norm()));
  CHECK((mp.Pvz - cov * H.transpose()).norm() < 1e-10 * (cov * H.transpose()).norm());
  CHECK((mp.Pzz - H * cov * H.transpose()).norm() < 1e-10 * (H * cov * H.transpose()).norm());
  CHECK(mp.points.rows() == n);
  CHECK(mp.points.cols() == 2 * n + 1);

  SUBCASE("vanishing covariance degenerates to a point evaluation") {
    MeasPrediction tiny =
        predict_measurement(mean, 1e-24 * Eigen::MatrixXd::Identity(n, n), model, w);
    CHECK(tiny.Pvz.norm() < 1e-9);
    CHECK(tiny.Pzz.norm() < 1e-9);
    CHECK((tiny.zhat - H * mean).norm() < 1e-9);
  }
  SUBCASE("dimension mismatch in the map is rejected") {
    MeasurementModel bad{mdim + 1, [H](const Eigen::VectorXd& v) { return (H * v).eval(); }};
    CHECK_THROWS_AS(predict_measurement(mean, cov, bad, w), DimensionMismatch);
  }
}

TEST_CASE("vb_update_P arithmetic") {
  const Eigen::VectorXd uniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  SUBCASE("scalar hand example: (2 + 1)/(4 - 1 - 1) = 1.5") {
    IwState pri;
    pri.delta = 3.0;
    pri.Delta = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    // Points {v, v + d, v - d} around pred mean v with 2 d^2 = 3 make the
    // scatter M = (1/3) * sum = 1 under explicit uniform weights.
    double d = std::sqrt(1.5);
    Eigen::MatrixXd pts(1, 3);
    pts << 5.0, 5.0 + d, 5.0 - d;
    Eigen::VectorXd pred(1);
    pred << 5.0;
    PUpdate up = vb_update_P(pri, pts, uniform3, pred);
    CHECK(up.delta == doctest::Approx(4.0));
    CHECK(up.Delta(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(up.mean(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("UT mean weights recover the sigma-point covariance as the scatter") {
    // alpha = 1 defaults: scale = 3, tails 1/6 each, so points v +- sqrt(3)
    // give M = 2 * (1/6) * 3 = 1; equivalently M = P for exact sigma points.
    IwState pri;
    pri.delta = 3.0;
    pri.Delta = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    UtWeights w = ut_weights(1, UtParams{});
    Eigen::VectorXd pred(1);
    pred << 5.0;
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = sigma_points(pred, P, w);
    PUpdate up = vb_update_P(pri, pts, w.wv, pred);
    CHECK(up.Delta(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(up.mean(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("zero spread at the predicted mean leaves Delta untouched") {
    IwState pri;
    pri.delta = 5.0;
    pri.Delta = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(1, 3, 5.0);
    Eigen::VectorXd pred(1);
    pred << 5.0;
    PUpdate up = vb_update_P(pri, pts, uniform3, pred);
    CHECK((up.Delta - pri.Delta).norm() == 0.0);
  }
  SUBCASE("insufficient degrees of freedom rejected") {
    IwState pri;
    pri.delta = 0.5;  // + 1 - alpha - 1 = -0.5 for alpha = 1
    pri.Delta = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(1, 3, 0.0);
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(vb_update_P(pri, pts, uniform3, pred), DofUnderflow);
  }
  SUBCASE("weight/point count mismatch rejected") {
    IwState pri;
    pri.delta = 5.0;
    pri.Delta = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(1, 3, 0.0);
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(vb_update_P(pri, pts, Eigen::VectorXd::Constant(4, 0.25), pred),
                    DimensionMismatch);
  }
}

TEST_CASE("vb_update_R arithmetic") {
  MeasurementModel zero_map{1, [](const Eigen::VectorXd&) {
                               return Eigen::VectorXd::Zero(1).eval();
                             }};
  const Eigen::VectorXd uniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  SUBCASE("scalar hand example: (3 + 1)/(5 - 1 - 1) = 4/3") {
    IwState pri;
    pri.iota = 4.0;
    pri.Iota = 3.0 * Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 3);  // h(sigma) = 0 for all points
    Eigen::VectorXd z(1);
    z << 1.0;  // A = sum w_i * 1 = 1 for any normalized weights
    RUpdate up = vb_update_R(pri, pts, uniform3, zero_map, z);
    CHECK(up.iota == doctest::Approx(5.0));
    CHECK(up.Iota(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(up.mean(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("perfect prediction leaves Iota at its prior") {
    IwState pri;
    pri.iota = 4.0;
    pri.Iota = 3.0 * Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 3);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
    RUpdate up = vb_update_R(pri, pts, uniform3, zero_map, z);
    CHECK((up.Iota - pri.Iota).norm() == 0.0);
    CHECK(up.mean(0, 0) == doctest::Approx(3.0 / 3.0));
  }
  SUBCASE("insufficient degrees of freedom rejected") {
    IwState pri;
    pri.iota = 0.5;  // posterior dof 0.5 + 1 - beta - 1 = -0.5 for beta = 1
    pri.Iota = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 3);
    CHECK_THROWS_AS(vb_update_R(pri, pts, uniform3, zero_map, Eigen::VectorXd::Zero(1)),
                    DofUnderflow);
  }
  SUBCASE("linear model: the true noise variance is a fixed point") {
    // One-dimensional filter-free check of the fixed-point property: z = v + r
    // with posterior sigma points of (vhat, Phat). The expected scatter under
    // the UT mean weights is (z - vhat)^2 + Phat; averaged over noise
    // realizations with vhat = the exact posterior mean, the stationary
    // R-estimate solves R = R^2/(S) + x R/(S), S = x + R -- i.e. R itself.
    UtWeights w = ut_weights(1, UtParams{});
    MeasurementModel ident{1, [](const Eigen::VectorXd& v) { return v.eval(); }};
    Eigen::VectorXd vhat(1);
    vhat << 2.0;
    Eigen::MatrixXd Phat = 0.25 * Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd pts = sigma_points(vhat, Phat, w);
    Eigen::VectorXd z(1);
    z << 2.5;
    IwState pri;
    pri.iota = 4.0;
    pri.Iota = Eigen::MatrixXd::Zero(1, 1);
    RUpdate up = vb_update_R(pri, pts, w.wv, ident, z);
    // A = (z - vhat)^2 + Phat = 0.25 + 0.25.
    CHECK(up.Iota(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("IW expectation law verified against Bartlett sampling") {
  // X ~ IW(Psi, nu), p = 2: E[X] = Psi/(nu - p - 1). Draw W ~ Wishart(Psi^-1, nu)
  // by the Bartlett factorization and invert.
  const int p = 2, nu = 7, draws = 10000;
  Eigen::MatrixXd Psi(p, p);
  Psi << 2.0, 0.3, 0.3, 1.0;
  Eigen::MatrixXd analytic = Psi / (nu - p - 1);

  Eigen::LLT<Eigen::MatrixXd> llt(Psi.inverse());
  Eigen::MatrixXd L = llt.matrixL();
  RngStream rng(31, {0});
  auto chi = [&rng](int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      double x = rng.normal();
      s += x * x;
    }
    return s;
  };

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      A(i, i) = std::sqrt(chi(nu - i));
      for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
    }
    Eigen::MatrixXd W = (L * A) * (L * A).transpose();
    acc += W.inverse();
  }
  acc /= draws;
  CHECK((acc - analytic).norm() < 0.05 * analytic.norm());

  // The same closed form drives both variational refreshes.
  IwState pri;
  pri.delta = nu;
  pri.Delta = Psi;
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(p, 2 * p + 1);  // zero scatter
  Eigen::VectorXd pred = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd wts = Eigen::VectorXd::Constant(2 * p + 1, 1.0 / (2 * p + 1));
  PUpdate up = vb_update_P(pri, pts, wts, pred);
  CHECK((up.mean - Psi / (nu + 1 - p - 1)).norm() < 1e-12);
}

TEST_CASE("statistical linearization recovers linear maps and PSD residuals") {
  RngStream rng(11, {0});
  const int n = 4, mdim = 3;

  SUBCASE("exact recovery of a linear observation matrix") {
    Eigen::MatrixXd H(mdim, n);
    for (int i = 0; i < mdim; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = rng.normal();
    Eigen::MatrixXd P = random_spd(n, rng);
    Eigen::MatrixXd Pvz = P * H.transpose();
    Eigen::MatrixXd Pzz = H * P * H.transpose();
    Linearization lin = statistical_linearize(Pvz, P, Pzz);
    CHECK((lin.H - H).norm() < 1e-9 * H.norm());
    CHECK(lin.Ebar.norm() < 1e-9);
  }
  SUBCASE("zero cross covariance passes the spread through") {
    Eigen::MatrixXd P = random_spd(n, rng);
    Eigen::MatrixXd Pzz = random_spd(mdim, rng);
    Linearization lin = statistical_linearize(Eigen::MatrixXd::Zero(n, mdim), P, Pzz);
    CHECK(lin.H.norm() == 0.0);
    CHECK((lin.Ebar - Pzz).norm() < 1e-12 * Pzz.norm());
  }
  SUBCASE("residual spread is PSD for jointly consistent inputs") {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd J = random_spd(n + mdim, rng);
      Linearization lin = statistical_linearize(J.topRightCorner(n, mdim),
                                                J.topLeftCorner(n, n),
                                                J.bottomRightCorner(mdim, mdim));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lin.Ebar);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("robust_correct with uniform weights equals the plain Kalman update") {
  RngStream rng(13, {0});
  const int n = 4, mdim = 5;
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd v = random_vec(n, rng);
    Eigen::MatrixXd P = random_spd(n, rng);
    Eigen::MatrixXd H(mdim, n);
    for (int i = 0; i < mdim; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = rng.normal();
    Eigen::MatrixXd R = random_spd(mdim, rng, 0.5);
    Eigen::MatrixXd Ebar = clip_psd(random_spd(mdim, rng, 0.1));
    Eigen::VectorXd z = random_vec(mdim, rng);
    Eigen::VectorXd zhat = H * v;

    CorrectionSettings cs;
    cs.force_uniform_weights = true;
    CorrectionResult res =
        robust_correct(v, P, R, Ebar, H, z, zhat, KernelParams{}, cs);

    Eigen::MatrixXd S = H * P * H.transpose() + R + Ebar;
    Eigen::MatrixXd K = P * H.transpose() * S.inverse();
    Eigen::VectorXd expect = v + K * (z - zhat);
    CHECK((res.v - expect).norm() < 1e-8 * std::max(1.0, expect.norm()));
    CHECK((res.gain - K).norm() < 1e-8 * K.norm());
    CHECK(res.min_weight == doctest::Approx(1.0));
  }
}

TEST_CASE("robust_correct returns the prior mean on zero innovation") {
  RngStream rng(17, {0});
  const int n = 3, mdim = 4;
  Eigen::VectorXd v = random_vec(n, rng);
  Eigen::MatrixXd P = random_spd(n, rng);
  Eigen::MatrixXd H(mdim, n);
  for (int i = 0; i < mdim; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = rng.normal();
  Eigen::MatrixXd R = random_spd(mdim, rng, 0.5);
  Eigen::VectorXd zhat = H * v;

  CorrectionResult res = robust_correct(v, P, R, Eigen::MatrixXd::Zero(mdim, mdim), H, zhat,
                                        zhat, KernelParams{}, CorrectionSettings{});
  CHECK((res.v - v).norm() < 1e-12 * std::max(1.0, v.norm()));
  CHECK(res.converged);
}

TEST_CASE("robust_correct downweights a gross outlier; printed weight form rewards it") {
  // Linear Gaussian toy: n = 2 state, 6 direct measurements of component sums.
  RngStream rng(19, {0});
  const int n = 2, mdim = 6;
  Eigen::MatrixXd H(mdim, n);
  H << 1, 0, 0, 1, 1, 1, 1, -1, 2, 1, 1, 2;
  Eigen::VectorXd v_true(n);
  v_true << 0.7, -0.4;
  Eigen::MatrixXd P = 0.5 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd R = 0.01 * Eigen::MatrixXd::Identity(mdim, mdim);
  Eigen::VectorXd v_prior = v_true + 0.3 * random_vec(n, rng);

  Eigen::VectorXd z = H * v_true;
  for (int i = 0; i < mdim; ++i) z(i) += 0.1 * rng.normal();
  z(3) += 50.0 * 0.1;  // +50 sigma outlier on channel 3

  Eigen::VectorXd zhat = H * v_prior;
  KernelParams kp;  // defaults c=2, gamma=12, xi=1.9
  kp.gamma = 2.0;   // tighter bandwidth so the outlier is visibly suppressed

  CorrectionSettings robust;
  CorrectionResult rob = robust_correct(v_prior, P, R, Eigen::MatrixXd::Zero(mdim, mdim), H, z,
                                        zhat, kp, robust);

  CorrectionSettings uniform;
  uniform.force_uniform_weights = true;
  CorrectionResult uni = robust_correct(v_prior, P, R, Eigen::MatrixXd::Zero(mdim, mdim), H, z,
                                        zhat, kp, uniform);

  CorrectionSettings printed;
  printed.weight_form = CorrectionSettings::WeightForm::Printed;
  CorrectionResult pr = robust_correct(v_prior, P, R, Eigen::MatrixXd::Zero(mdim, mdim), H, z,
                                       zhat, kp, printed);

  CHECK(rob.min_weight < 0.01);  // outlier channel influence collapses
  CHECK((rob.v - v_true).norm() < (uni.v - v_true).norm());
  // The printed (non-inverted) application trusts the outlier harder than the
  // uniform filter does; the inverse form is the only robust one.
  CHECK((rob.v - v_true).norm() < (pr.v - v_true).norm());
}

TEST_CASE("robust_correct reports non-convergence but still returns an iterate") {
  RngStream rng(23, {0});
  const int n = 2, mdim = 4;
  Eigen::MatrixXd H(mdim, n);
  H << 1, 0, 0, 1, 1, 1, 1, -1;
  Eigen::VectorXd v = random_vec(n, rng);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd R = 0.01 * Eigen::MatrixXd::Identity(mdim, mdim);
  Eigen::VectorXd z = H * v + 5.0 * Eigen::VectorXd::Ones(mdim);

  CorrectionSettings cs;
  cs.max_iter = 1;
  cs.tol = 1e-15;
  KernelParams kp;
  kp.gamma = 1.0;
  CorrectionResult res =
      robust_correct(v, P, R, Eigen::MatrixXd::Zero(mdim, mdim), H, z, H * v, kp, cs);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.v.allFinite());
}

TEST_CASE("Joseph covariance update") {
  SUBCASE("zero gain returns the prior covariance") {
    Eigen::MatrixXd P = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd H = Eigen::MatrixXd::Ones(2, 3);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2, 2);
    CHECK((update_posterior_covariance(P, K, H, R, E) - P).norm() == 0.0);
  }
  SUBCASE("scalar hand example = 0.5") {
    Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd K = 0.5 * one;
    Eigen::MatrixXd P = update_posterior_covariance(one, K, one, one, 0.0 * one);
    CHECK(P(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("result stays PSD for random inputs") {
    RngStream rng(29, {0});
    for (int trial = 0; trial < 20; ++trial) {
      int n = 3, mdim = 2;
      Eigen::MatrixXd P = random_spd(n, rng);
      Eigen::MatrixXd R = random_spd(mdim, rng);
      Eigen::MatrixXd E = clip_psd(random_spd(mdim, rng, 0.1));
      Eigen::MatrixXd K(n, mdim), H(mdim, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < mdim; ++j) K(i, j) = rng.normal();
      for (int i = 0; i < mdim; ++i)
        for (int j = 0; j < n; ++j) H(i, j) = rng.normal();
      Eigen::MatrixXd out = update_posterior_covariance(P, K, H, R, E);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
      CHECK((out - out.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("information form round trips") {
  Eigen::VectorXd v(2);
  v << 1.0, 1.0;
  SUBCASE("identity covariance is a fixed point") {
    InformationForm info = to_information(v, Eigen::MatrixXd::Identity(2, 2));
    CHECK((info.C - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK((info.chi - v).norm() < 1e-12);
  }
  SUBCASE("diagonal example") {
    Eigen::MatrixXd P = Eigen::Vector2d(2.0, 4.0).asDiagonal();
    InformationForm info = to_information(v, P);
    CHECK(info.chi(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(info.chi(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK((P * info.chi - v).norm() < 1e-10);
  }
}

TEST_CASE("local_step tracks truth better than the open-loop prediction") {
  PartitionedGrid g = build_partition(load_bundled("ieee14"), default_partition("ieee14"));
  const RegionModel& r = g.region(1);
  EstimatorConfig cfg;  // defaults: VB on, J = 3, standard UT regime
  EstimatorState st = init_state(r, cfg);

  Trajectory t = simulate(g, NoiseSuite{}, 100, 9001, 0);
  Eigen::VectorXd v_open = st.v;
  double err_filter = 0.0, err_open = 0.0;
  for (int m = 1; m <= 100; ++m) {
    st = local_step(st, r, t.frames[static_cast<size_t>(m - 1)][0].z, cfg);
    v_open = r.F * v_open + r.G * r.steady_state;
    err_filter += (st.v - t.states[static_cast<size_t>(m)][0]).norm();
    err_open += (v_open - t.states[static_cast<size_t>(m)][0]).norm();

    // Structural invariants at every step.
    CHECK((st.P - st.P.transpose()).norm() < 1e-12);
    CHECK((st.C * st.P - Eigen::MatrixXd::Identity(r.alpha(), r.alpha())).norm() < 1e-8);
    CHECK((st.chi - st.C * st.v).norm() < 1e-8 * std::max(1.0, st.v.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.P);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK(err_filter / 100.0 < err_open / 100.0);
}

TEST_CASE("local_step validation and degenerate configurations") {
  PartitionedGrid g = build_partition(load_bundled("ieee14"), default_partition("ieee14"));
  const RegionModel& r = g.region(1);
  EstimatorConfig cfg;
  EstimatorState st = init_state(r, cfg);
  Trajectory t = simulate(g, NoiseSuite{}, 1, 77, 0);
  Eigen::VectorXd z = t.frames[0][0].z;

  SUBCASE("J = 0 rejected") {
    EstimatorConfig bad = cfg;
    bad.vb.iterations = 0;
    CHECK_THROWS_AS(local_step(st, r, z, bad), ConfigError);
  }
  SUBCASE("NaN measurement names the offending channel") {
    Eigen::VectorXd zn = z;
    zn(3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(local_step(st, r, zn, cfg),
                         doctest::Contains("channel 3"), Error);
  }
  SUBCASE("wrong measurement dimension rejected") {
    CHECK_THROWS_AS(local_step(st, r, z.head(3), cfg), DimensionMismatch);
  }
  SUBCASE("large-spread UT parameters survive through the safeguards") {
    EstimatorConfig wide = cfg;
    wide.ut.lambda = std::exp(2.0);
    wide.ut.eta = 0.02;
    EstimatorState ws = init_state(r, wide);
    for (int m = 1; m <= 5; ++m) {
      ws = local_step(ws, r, t.frames[0][0].z, wide);
      CHECK(ws.v.allFinite());
      CHECK(ws.P.allFinite());
      // The eigenvalue floor keeps P positive semidefinite up to
      // reconstruction round-off, which scales with the largest eigenvalue
      // (the filter legitimately blows its covariance up under these
      // parameters; it must not go indefinite or non-finite).
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ws.P);
      const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
      CHECK(es.eigenvalues().minCoeff() >= -1e-13 * std::max(1.0, lmax));
    }
  }
  SUBCASE("VB disabled keeps the fixed nominal measurement noise") {
    EstimatorConfig off = cfg;
    off.vb.enabled = false;
    EstimatorState os = init_state(r, off);
    for (int m = 0; m < 3; ++m) os = local_step(os, r, z, off);
    CHECK((os.R_est - cfg.init_R_nominal * Eigen::MatrixXd::Identity(r.beta(), r.beta()))
              .norm() == 0.0);
  }
}

TEST_CASE("init_state wires the documented initial values") {
  PartitionedGrid g = build_partition(load_bundled("ieee14"), default_partition("ieee14"));
  const RegionModel& r = g.region(3);
  EstimatorConfig cfg;
  EstimatorState st = init_state(r, cfg);
  CHECK((st.v - r.steady_state).norm() == 0.0);
  CHECK((st.P - 1e-2 * Eigen::MatrixXd::Identity(r.alpha(), r.alpha())).norm() == 0.0);
  CHECK(st.iw.iota == doctest::Approx(r.beta() + 2.0));
  // Initial R mean = Iota/(iota - beta - 1) = 1e-3 I.
  Eigen::MatrixXd mean = st.iw.Iota / (st.iw.iota - r.beta() - 1);
  CHECK((mean - 1e-3 * Eigen::MatrixXd::Identity(r.beta(), r.beta())).norm() < 1e-15);
  CHECK((st.R_est - 1e-3 * Eigen::MatrixXd::Identity(r.beta(), r.beta())).norm() == 0.0);
  CHECK((st.C * st.P - Eigen::MatrixXd::Identity(r.alpha(), r.alpha())).norm() < 1e-10);
}
