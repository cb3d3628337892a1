#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wasse/metrics.hpp"
#include "wasse/scenario.hpp"

namespace wasse {

struct RunOptions {
  int threads = 0;              ///< 0 = hardware concurrency
  bool keep_run_errors = true;  ///< retain per-run errors (errors.csv, recompute tests)
  bool keep_truth = false;      ///< retain truth trajectories (truth.csv)
};

struct AlgoMetrics {
  Eigen::MatrixXd rmse;   ///< steps x components
  Eigen::VectorXd armse;  ///< per component
  /// Per-run signed errors (steps x components), indexed by run id; failed
  /// runs hold empty matrices. Populated when keep_run_errors.
  std::vector<Eigen::MatrixXd> run_errors;
};

struct RunDiagnostics {
  int run = 0;
  bool failed = false;
  std::string note;  ///< failure message when failed
  double vb_iterations_mean = 0.0;
  double fp_iterations_mean = 0.0;
  long long jitter_events = 0;
  double min_weight = 1.0;
};

struct DiagnosticsSummary {
  double mean_vb_iterations = 0.0;
  double mean_fp_iterations = 0.0;
  long long jitter_events = 0;
  double min_weight = 1.0;
  double wall_seconds = 0.0;
};

struct MonteCarloResult {
  std::vector<ComponentInfo> components;
  int steps = 0;
  int requested_runs = 0;
  int completed_runs = 0;
  std::vector<int> failed_runs;  ///< ascending run ids
  std::optional<AlgoMetrics> proposed;
  std::optional<AlgoMetrics> baseline;
  /// Truth values (steps x components) per run; populated when keep_truth.
  std::vector<Eigen::MatrixXd> truth;
  /// Measurement-noise estimate per region (proposed only), averaged over
  /// completed runs and the final two-thirds of the steps.
  std::vector<Eigen::MatrixXd> mean_R_est;
  std::vector<RunDiagnostics> run_diagnostics;  ///< per run, ascending
  DiagnosticsSummary diagnostics;               ///< proposed-side aggregate
};

/// Run the scenario: one truth/measurement realization per run, both
/// estimators on identical data, deterministic for a fixed seed regardless of
/// thread count. Throws ExperimentError when more than 5% of runs fail.
MonteCarloResult run_monte_carlo(const Scenario& scenario, const RunOptions& options = {});

struct SweepResult {
  std::vector<double> xi_values;
  std::vector<double> gamma_values;
  std::vector<ComponentInfo> components;
  /// Proposed-algorithm ARMSE per component, indexed [gamma][xi].
  std::vector<std::vector<Eigen::VectorXd>> armse;
  /// Reference metric: phase ARMSE in degrees at the lowest-numbered bus,
  /// shaped gamma rows x xi columns.
  Eigen::MatrixXd reference_phase_armse;
};

/// Grid sweep over the kernel shape/bandwidth with common random numbers
/// (same seed, hence identical truth and noise, in every cell).
SweepResult param_sweep(const Scenario& scenario, const std::vector<double>& xi_values,
                        const std::vector<double>& gamma_values,
                        const RunOptions& options = {});

struct AnomalyStats {
  ComponentInfo component;
  double pre_mean = 0.0;    ///< mean RMSE over up to 25 steps before the anomaly
  double peak = 0.0;        ///< max RMSE at or after the anomaly step
  double ratio = 0.0;       ///< peak / pre_mean
  int recovery_steps = -1;  ///< first offset >= 0 with RMSE <= 2*pre_mean, -1 if never
};

struct AnomalyResult {
  MonteCarloResult mc;
  std::vector<AnomalyStats> proposed;
  std::vector<AnomalyStats> baseline;
};

/// Monte-Carlo run with the scenario's anomaly injected plus per-component
/// spike/recovery statistics. Requires scenario.anomaly.enabled.
AnomalyResult anomaly_experiment(const Scenario& scenario, const RunOptions& options = {});

/// CSV emission (schemas documented in README.md). Angle rows carry radians
/// in `value` and degrees in `value_reported`; magnitude rows repeat the
/// per-unit value in both. "%.17g" formatting keeps equal doubles byte-equal.
void write_rmse_csv(const std::string& path, const MonteCarloResult& result);
void write_armse_csv(const std::string& path, const MonteCarloResult& result);
void write_errors_csv(const std::string& path, const MonteCarloResult& result);
void write_truth_csv(const std::string& path, const MonteCarloResult& result);
void write_diagnostics_csv(const std::string& path, const MonteCarloResult& result);
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_anomaly_csv(const std::string& path, const AnomalyResult& result);

/// Emit the standard file set into `out_dir` (created if needed): rmse.csv,
/// armse.csv, diagnostics.csv, plus errors.csv / truth.csv when retained.
void write_run_outputs(const std::string& out_dir, const MonteCarloResult& result);

}  // namespace wasse
