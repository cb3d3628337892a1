#include "wasse/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "wasse/baseline.hpp"
#include "wasse/errors.hpp"
#include "wasse/fusion.hpp"
#include "wasse/truth_sim.hpp"
#include "wasse/vb_ukf.hpp"

namespace wasse {

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

/// Fixed per-channel variances the baseline filter assumes.
Eigen::VectorXd baseline_r_diag(const RegionModel& region, const NoiseSuite& noise,
                                const BaselineConfig& cfg, double nominal) {
  Eigen::VectorXd d(region.beta());
  if (cfg.r_policy == BaselineConfig::RPolicy::kNominal) {
    d.setConstant(nominal);
    return d;
  }
  const RegionModel::Layout lay = region.layout();
  for (int i = lay.scada_v_begin; i < lay.scada_v_end; ++i) {
    d[i] = noise.scada_v.mixture_variance();
  }
  for (int i = lay.flow_begin; i < lay.flow_end; ++i) {
    d[i] = noise.scada_pq.mixture_variance();
  }
  for (int i = lay.pmu_begin; i < lay.pmu_end; ++i) {
    d[i] = noise.pmu.mixture_variance();
  }
  return d;
}

struct RunOutput {
  bool failed = false;
  std::string note;
  Eigen::MatrixXd err_prop;
  Eigen::MatrixXd err_base;
  Eigen::MatrixXd truth;
  std::vector<Eigen::MatrixXd> r_est_sum;  ///< per region
  long long r_est_samples = 0;
  long long vb_iterations = 0;
  long long fp_iterations = 0;
  long long jitter_events = 0;
  long long diag_samples = 0;
  double min_weight = 1.0;
};

struct RunContext {
  const Scenario& sc;
  const PartitionedGrid& grid;
  const RunOptions& opt;
  int ncomp = 0;
  bool run_proposed = false;
  bool run_baseline = false;
  int r_window_begin = 0;  ///< first step (1-based) entering mean_R_est
};

void record_estimate(Eigen::MatrixXd& table, int row, const PartitionedGrid& grid,
                     const std::vector<Eigen::VectorXd>& estimate,
                     const std::vector<Eigen::VectorXd>& truth) {
  int col = 0;
  for (std::size_t i = 0; i < grid.regions.size(); ++i) {
    const int a = grid.regions[i].alpha();
    table.row(row).segment(col, a) = (estimate[i] - truth[i]).transpose();
    col += a;
  }
}

RunOutput run_one(const RunContext& ctx, int run) {
  const Scenario& sc = ctx.sc;
  const PartitionedGrid& grid = ctx.grid;
  const int nregions = static_cast<int>(grid.regions.size());
  const int M = sc.steps;

  RunOutput out;
  try {
    Trajectory traj = simulate(grid, sc.noise, M, sc.seed, static_cast<std::uint64_t>(run));
    if (sc.anomaly.enabled) {
      inject_anomaly(traj.frames[sc.anomaly.step - 1], grid, sc.anomaly.region,
                     sc.anomaly.factor);
    }

    std::vector<EstimatorState> prop;
    std::vector<BaselineState> base;
    std::vector<Eigen::MatrixXd> r_base;
    if (ctx.run_proposed) {
      out.err_prop.setZero(M, ctx.ncomp);
      out.r_est_sum.resize(nregions);
      for (int i = 0; i < nregions; ++i) {
        prop.push_back(init_state(grid.regions[i], sc.estimator));
        out.r_est_sum[i] = Eigen::MatrixXd::Zero(grid.regions[i].beta(), grid.regions[i].beta());
      }
    }
    if (ctx.run_baseline) {
      out.err_base.setZero(M, ctx.ncomp);
      for (int i = 0; i < nregions; ++i) {
        base.push_back(baseline_init(grid.regions[i], sc.estimator.init_P));
        r_base.push_back(
            baseline_r_diag(grid.regions[i], sc.noise, sc.baseline, sc.estimator.init_R_nominal)
                .asDiagonal());
      }
    }
    if (ctx.opt.keep_truth) out.truth.setZero(M, ctx.ncomp);

    FusionSettings fusion_settings;
    fusion_settings.ut = sc.estimator.ut;
    fusion_settings.reference = sc.fusion.reference;

    std::vector<EstimatorState> locals(ctx.run_proposed ? nregions : 0);
    std::vector<EstimatorState> fused(ctx.run_proposed ? nregions : 0);
    std::vector<Eigen::VectorXd> estimate(nregions);
    for (int m = 1; m <= M; ++m) {
      const std::vector<MeasurementFrame>& frames = traj.frames[m - 1];

      if (ctx.run_proposed) {
        for (int i = 0; i < nregions; ++i) {
          StepDiagnostics d;
          locals[i] = local_step(prop[i], grid.regions[i], frames[i].z, sc.estimator, &d);
          out.vb_iterations += d.vb_iterations;
          out.fp_iterations += d.fp_iterations;
          out.jitter_events += d.jitter_events;
          out.min_weight = std::min(out.min_weight, d.min_weight);
          ++out.diag_samples;
        }
        if (sc.fusion.enabled) {
          std::vector<NeighborSummary> summaries(nregions);
          for (int i = 0; i < nregions; ++i) {
            summaries[i] = exchange(grid.regions[i].region_id, locals[i]);
          }
          for (int i = 0; i < nregions; ++i) {
            const int rid = grid.regions[i].region_id;
            std::vector<EdgeMeasurement> edges;
            const auto nb_it = grid.neighbors.find(rid);
            if (nb_it != grid.neighbors.end()) {
              for (const int nb : nb_it->second) {
                EdgeModel model = make_edge_model(grid, rid, nb);
                EdgeMeasurement e;
                e.z = frames[i].edge.at(nb);
                e.neighbor = summaries[nb - 1];
                e.h = std::move(model.h);
                e.R = sc.fusion.edge_variance *
                      Eigen::MatrixXd::Identity(model.dim, model.dim);
                edges.push_back(std::move(e));
              }
            }
            fused[i] = fuse(locals[i], edges, fusion_settings);
          }
        } else {
          fused = locals;
        }
        for (int i = 0; i < nregions; ++i) estimate[i] = fused[i].v;
        record_estimate(out.err_prop, m - 1, grid, estimate, traj.states[m]);
        for (int i = 0; i < nregions; ++i) {
          prop[i] = sc.fusion.closed_loop ? fused[i] : locals[i];
        }
        if (m >= ctx.r_window_begin) {
          for (int i = 0; i < nregions; ++i) out.r_est_sum[i] += locals[i].R_est;
          ++out.r_est_samples;
        }
      }

      if (ctx.run_baseline) {
        for (int i = 0; i < nregions; ++i) {
          base[i] = ukf_step(base[i], grid.regions[i], frames[i].z, r_base[i], sc.estimator.ut);
          estimate[i] = base[i].v;
        }
        record_estimate(out.err_base, m - 1, grid, estimate, traj.states[m]);
      }

      if (ctx.opt.keep_truth) {
        int col = 0;
        for (int i = 0; i < nregions; ++i) {
          const int a = grid.regions[i].alpha();
          out.truth.row(m - 1).segment(col, a) = traj.states[m][i].transpose();
          col += a;
        }
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.note = e.what();
  }
  return out;
}

}  // namespace

MonteCarloResult run_monte_carlo(const Scenario& scenario, const RunOptions& options) {
  validate_scenario(scenario);
  const auto t0 = std::chrono::steady_clock::now();
  const PartitionedGrid grid = build_scenario_grid(scenario);

  RunContext ctx{scenario, grid, options};
  ctx.run_proposed = scenario.algorithm != Algorithm::kBaseline;
  ctx.run_baseline = scenario.algorithm != Algorithm::kProposed;
  ctx.r_window_begin = scenario.steps / 3 + 1;

  MonteCarloResult result;
  result.components = component_layout(grid);
  ctx.ncomp = static_cast<int>(result.components.size());
  result.steps = scenario.steps;
  result.requested_runs = scenario.runs;

  // Parallel phase: each run writes only its own slot.
  std::vector<RunOutput> slots(scenario.runs);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int nthreads = std::max(
      1, std::min(options.threads > 0 ? options.threads : std::max(hw, 1), scenario.runs));
  if (nthreads == 1) {
    for (int r = 0; r < scenario.runs; ++r) slots[r] = run_one(ctx, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < scenario.runs; r = next.fetch_add(1)) {
          slots[r] = run_one(ctx, r);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // Deterministic reduction in ascending run order.
  ErrorAccumulator acc_prop(scenario.steps, ctx.ncomp);
  ErrorAccumulator acc_base(scenario.steps, ctx.ncomp);
  std::vector<Eigen::MatrixXd> r_est_total;
  long long r_est_samples = 0;
  if (ctx.run_proposed) {
    r_est_total.resize(grid.regions.size());
    for (std::size_t i = 0; i < grid.regions.size(); ++i) {
      r_est_total[i] =
          Eigen::MatrixXd::Zero(grid.regions[i].beta(), grid.regions[i].beta());
    }
    result.proposed.emplace();
    if (options.keep_run_errors) result.proposed->run_errors.resize(scenario.runs);
  }
  if (ctx.run_baseline) {
    result.baseline.emplace();
    if (options.keep_run_errors) result.baseline->run_errors.resize(scenario.runs);
  }
  if (options.keep_truth) result.truth.resize(scenario.runs);

  long long vb_sum = 0, fp_sum = 0, diag_samples = 0;
  for (int r = 0; r < scenario.runs; ++r) {
    RunOutput& slot = slots[r];
    RunDiagnostics rd;
    rd.run = r;
    rd.failed = slot.failed;
    rd.note = slot.note;
    if (slot.failed) {
      result.failed_runs.push_back(r);
      result.run_diagnostics.push_back(std::move(rd));
      continue;
    }
    if (ctx.run_proposed) {
      acc_prop.add_run(slot.err_prop);
      if (options.keep_run_errors) result.proposed->run_errors[r] = std::move(slot.err_prop);
      for (std::size_t i = 0; i < r_est_total.size(); ++i) r_est_total[i] += slot.r_est_sum[i];
      r_est_samples += slot.r_est_samples;
      vb_sum += slot.vb_iterations;
      fp_sum += slot.fp_iterations;
      diag_samples += slot.diag_samples;
      result.diagnostics.jitter_events += slot.jitter_events;
      result.diagnostics.min_weight = std::min(result.diagnostics.min_weight, slot.min_weight);
      rd.vb_iterations_mean =
          slot.diag_samples > 0 ? double(slot.vb_iterations) / double(slot.diag_samples) : 0.0;
      rd.fp_iterations_mean =
          slot.diag_samples > 0 ? double(slot.fp_iterations) / double(slot.diag_samples) : 0.0;
      rd.jitter_events = slot.jitter_events;
      rd.min_weight = slot.min_weight;
    }
    if (ctx.run_baseline) {
      acc_base.add_run(slot.err_base);
      if (options.keep_run_errors) result.baseline->run_errors[r] = std::move(slot.err_base);
    }
    if (options.keep_truth) result.truth[r] = std::move(slot.truth);
    result.run_diagnostics.push_back(std::move(rd));
  }
  result.completed_runs = scenario.runs - static_cast<int>(result.failed_runs.size());

  if (static_cast<double>(result.failed_runs.size()) >
      0.05 * static_cast<double>(scenario.runs)) {
    std::string msg = "run failure rate exceeds 5% (" +
                      std::to_string(result.failed_runs.size()) + "/" +
                      std::to_string(scenario.runs) + ")";
    for (const RunDiagnostics& rd : result.run_diagnostics) {
      if (rd.failed) {
        msg += "; run " + std::to_string(rd.run) + ": " + rd.note;
        break;
      }
    }
    throw ExperimentError(msg);
  }

  if (ctx.run_proposed) {
    result.proposed->rmse = acc_prop.rmse_table();
    result.proposed->armse = acc_prop.armse_table();
    result.mean_R_est.resize(r_est_total.size());
    for (std::size_t i = 0; i < r_est_total.size(); ++i) {
      result.mean_R_est[i] =
          r_est_samples > 0
              ? Eigen::MatrixXd(r_est_total[i] / static_cast<double>(r_est_samples))
              : r_est_total[i];
    }
    result.diagnostics.mean_vb_iterations =
        diag_samples > 0 ? double(vb_sum) / double(diag_samples) : 0.0;
    result.diagnostics.mean_fp_iterations =
        diag_samples > 0 ? double(fp_sum) / double(diag_samples) : 0.0;
  }
  if (ctx.run_baseline) {
    result.baseline->rmse = acc_base.rmse_table();
    result.baseline->armse = acc_base.armse_table();
  }
  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

SweepResult param_sweep(const Scenario& scenario, const std::vector<double>& xi_values,
                        const std::vector<double>& gamma_values, const RunOptions& options) {
  if (xi_values.empty() || gamma_values.empty()) {
    throw ConfigError("param_sweep: xi and gamma grids must be non-empty");
  }
  SweepResult out;
  out.xi_values = xi_values;
  out.gamma_values = gamma_values;

  RunOptions cell_options = options;
  cell_options.keep_run_errors = false;
  cell_options.keep_truth = false;

  out.armse.resize(gamma_values.size());
  out.reference_phase_armse.setZero(static_cast<Eigen::Index>(gamma_values.size()),
                                    static_cast<Eigen::Index>(xi_values.size()));
  int reference_comp = -1;
  for (std::size_t gi = 0; gi < gamma_values.size(); ++gi) {
    out.armse[gi].resize(xi_values.size());
    for (std::size_t xi = 0; xi < xi_values.size(); ++xi) {
      Scenario cell = scenario;
      cell.algorithm = Algorithm::kProposed;
      cell.estimator.kernel.gamma = gamma_values[gi];
      cell.estimator.kernel.xi = xi_values[xi];
      MonteCarloResult mc = run_monte_carlo(cell, cell_options);
      if (out.components.empty()) {
        out.components = mc.components;
        int lowest_bus = mc.components.front().bus_id;
        for (const ComponentInfo& c : mc.components) lowest_bus = std::min(lowest_bus, c.bus_id);
        for (std::size_t k = 0; k < mc.components.size(); ++k) {
          if (mc.components[k].bus_id == lowest_bus && mc.components[k].is_angle) {
            reference_comp = static_cast<int>(k);
            break;
          }
        }
      }
      out.armse[gi][xi] = mc.proposed->armse;
      out.reference_phase_armse(static_cast<Eigen::Index>(gi), static_cast<Eigen::Index>(xi)) =
          mc.proposed->armse[reference_comp] * kRadToDeg;
    }
  }
  return out;
}

namespace {

std::vector<AnomalyStats> anomaly_stats(const Eigen::MatrixXd& rmse_table,
                                        const std::vector<ComponentInfo>& components,
                                        int anomaly_step) {
  const int M = static_cast<int>(rmse_table.rows());
  const int pre_begin = std::max(1, anomaly_step - 25);  // 1-based, inclusive
  const int pre_end = anomaly_step - 1;
  std::vector<AnomalyStats> stats;
  stats.reserve(components.size());
  for (std::size_t k = 0; k < components.size(); ++k) {
    AnomalyStats s;
    s.component = components[k];
    double pre = 0.0;
    for (int m = pre_begin; m <= pre_end; ++m) pre += rmse_table(m - 1, k);
    pre /= static_cast<double>(pre_end - pre_begin + 1);
    s.pre_mean = pre;
    s.peak = rmse_table.col(static_cast<Eigen::Index>(k)).segment(anomaly_step - 1,
                                                                  M - anomaly_step + 1)
                 .maxCoeff();
    s.ratio = s.peak / pre;
    for (int m = anomaly_step; m <= M; ++m) {
      if (rmse_table(m - 1, k) <= 2.0 * pre) {
        s.recovery_steps = m - anomaly_step;
        break;
      }
    }
    stats.push_back(s);
  }
  return stats;
}

}  // namespace

AnomalyResult anomaly_experiment(const Scenario& scenario, const RunOptions& options) {
  if (!scenario.anomaly.enabled) {
    throw ConfigError("anomaly_experiment: scenario has no anomaly section");
  }
  if (scenario.anomaly.step < 2) {
    throw ConfigError("anomaly_experiment: anomaly.step must leave pre-anomaly steps");
  }
  AnomalyResult out;
  out.mc = run_monte_carlo(scenario, options);
  if (out.mc.proposed) {
    out.proposed = anomaly_stats(out.mc.proposed->rmse, out.mc.components, scenario.anomaly.step);
  }
  if (out.mc.baseline) {
    out.baseline = anomaly_stats(out.mc.baseline->rmse, out.mc.components, scenario.anomaly.step);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string reported(double value, const ComponentInfo& c) {
  return fmt(c.is_angle ? value * kRadToDeg : value);
}

const char* quantity_name(const ComponentInfo& c) { return c.is_angle ? "angle" : "magnitude"; }

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
  if (!out) throw ExperimentError("cannot open output file: " + path);
  return out;
}

void write_metric_rows(std::ofstream& out, const char* algorithm, const MonteCarloResult& r,
                       const AlgoMetrics& m, bool per_step) {
  for (std::size_t k = 0; k < r.components.size(); ++k) {
    const ComponentInfo& c = r.components[k];
    if (per_step) {
      for (int step = 1; step <= r.steps; ++step) {
        const double v = m.rmse(step - 1, static_cast<Eigen::Index>(k));
        out << algorithm << ',' << c.bus_id << ',' << quantity_name(c) << ',' << c.region_id
            << ',' << step << ',' << fmt(v) << ',' << reported(v, c) << '\n';
      }
    } else {
      const double v = m.armse[static_cast<Eigen::Index>(k)];
      out << algorithm << ',' << c.bus_id << ',' << quantity_name(c) << ',' << c.region_id << ','
          << fmt(v) << ',' << reported(v, c) << '\n';
    }
  }
}

}  // namespace

void write_rmse_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_csv(path);
  out << "algorithm,bus,quantity,region,step,value,value_reported\n";
  if (result.proposed) write_metric_rows(out, "dmgst_vbukf", result, *result.proposed, true);
  if (result.baseline) write_metric_rows(out, "ukf", result, *result.baseline, true);
}

void write_armse_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_csv(path);
  out << "algorithm,bus,quantity,region,value,value_reported\n";
  if (result.proposed) write_metric_rows(out, "dmgst_vbukf", result, *result.proposed, false);
  if (result.baseline) write_metric_rows(out, "ukf", result, *result.baseline, false);
}

namespace {

void write_error_rows(std::ofstream& out, const char* algorithm, const MonteCarloResult& r,
                      const AlgoMetrics& m) {
  for (std::size_t run = 0; run < m.run_errors.size(); ++run) {
    const Eigen::MatrixXd& e = m.run_errors[run];
    if (e.size() == 0) continue;  // failed run
    for (std::size_t k = 0; k < r.components.size(); ++k) {
      const ComponentInfo& c = r.components[k];
      for (int step = 1; step <= r.steps; ++step) {
        const double v = e(step - 1, static_cast<Eigen::Index>(k));
        out << algorithm << ',' << run << ',' << c.bus_id << ',' << quantity_name(c) << ','
            << c.region_id << ',' << step << ',' << fmt(v) << ',' << reported(v, c) << '\n';
      }
    }
  }
}

}  // namespace

void write_errors_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_csv(path);
  out << "algorithm,run,bus,quantity,region,step,value,value_reported\n";
  if (result.proposed) write_error_rows(out, "dmgst_vbukf", result, *result.proposed);
  if (result.baseline) write_error_rows(out, "ukf", result, *result.baseline);
}

void write_truth_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_csv(path);
  out << "run,bus,quantity,region,step,value,value_reported\n";
  for (std::size_t run = 0; run < result.truth.size(); ++run) {
    const Eigen::MatrixXd& t = result.truth[run];
    if (t.size() == 0) continue;
    for (std::size_t k = 0; k < result.components.size(); ++k) {
      const ComponentInfo& c = result.components[k];
      for (int step = 1; step <= result.steps; ++step) {
        const double v = t(step - 1, static_cast<Eigen::Index>(k));
        out << run << ',' << c.bus_id << ',' << quantity_name(c) << ',' << c.region_id << ','
            << step << ',' << fmt(v) << ',' << reported(v, c) << '\n';
      }
    }
  }
}

void write_diagnostics_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_csv(path);
  out << "run,failed,note,vb_iterations_mean,fp_iterations_mean,jitter_events,min_weight\n";
  for (const RunDiagnostics& rd : result.run_diagnostics) {
    std::string note = rd.note;
    for (char& ch : note) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << rd.run << ',' << (rd.failed ? 1 : 0) << ',' << note << ','
        << fmt(rd.vb_iterations_mean) << ',' << fmt(rd.fp_iterations_mean) << ','
        << rd.jitter_events << ',' << fmt(rd.min_weight) << '\n';
  }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out = open_csv(path);
  out << "xi,gamma,bus,quantity,region,armse,armse_reported\n";
  for (std::size_t gi = 0; gi < result.gamma_values.size(); ++gi) {
    for (std::size_t xi = 0; xi < result.xi_values.size(); ++xi) {
      const Eigen::VectorXd& a = result.armse[gi][xi];
      for (std::size_t k = 0; k < result.components.size(); ++k) {
        const ComponentInfo& c = result.components[k];
        const double v = a[static_cast<Eigen::Index>(k)];
        out << fmt(result.xi_values[xi]) << ',' << fmt(result.gamma_values[gi]) << ','
            << c.bus_id << ',' << quantity_name(c) << ',' << c.region_id << ',' << fmt(v) << ','
            << reported(v, c) << '\n';
      }
    }
  }
}

void write_anomaly_csv(const std::string& path, const AnomalyResult& result) {
  std::ofstream out = open_csv(path);
  out << "algorithm,bus,quantity,region,pre_rmse,pre_rmse_reported,peak_rmse,"
         "peak_rmse_reported,ratio,recovery_steps\n";
  const auto rows = [&](const char* algorithm, const std::vector<AnomalyStats>& stats) {
    for (const AnomalyStats& s : stats) {
      const ComponentInfo& c = s.component;
      out << algorithm << ',' << c.bus_id << ',' << quantity_name(c) << ',' << c.region_id << ','
          << fmt(s.pre_mean) << ',' << reported(s.pre_mean, c) << ',' << fmt(s.peak) << ','
          << reported(s.peak, c) << ',' << fmt(s.ratio) << ',' << s.recovery_steps << '\n';
    }
  };
  if (!result.proposed.empty()) rows("dmgst_vbukf", result.proposed);
  if (!result.baseline.empty()) rows("ukf", result.baseline);
}

void write_run_outputs(const std::string& out_dir, const MonteCarloResult& result) {
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  write_rmse_csv(path("rmse.csv"), result);
  write_armse_csv(path("armse.csv"), result);
  write_diagnostics_csv(path("diagnostics.csv"), result);
  const bool has_errors =
      (result.proposed && !result.proposed->run_errors.empty()) ||
      (result.baseline && !result.baseline->run_errors.empty());
  if (has_errors) write_errors_csv(path("errors.csv"), result);
  if (!result.truth.empty()) write_truth_csv(path("truth.csv"), result);
}

}  // namespace wasse
