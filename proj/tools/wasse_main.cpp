// wasse: wide-area state-estimation benchmark CLI.
//
// Subcommands:
//   run     one Monte-Carlo experiment from a scenario config
//   sweep   kernel-parameter grid sweep (common random numbers)
//   anomaly Monte-Carlo experiment with the configured measurement anomaly
//   parse   validate a grid case file
//
// Exit codes: 0 success, 1 --assert gate breached, 2 configuration/runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wasse/case_parser.hpp"
#include "wasse/errors.hpp"
#include "wasse/harness.hpp"

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

struct CommonArgs {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  int runs = 0;
  int steps = 0;
  bool assert_gate = false;
  bool dump_truth = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Scenario config file (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "Directory for CSV outputs");
  cmd->add_option("--seed", args.seed, "Override the scenario seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--runs", args.runs, "Override the Monte-Carlo run count");
  cmd->add_option("--steps", args.steps, "Override the step count");
  cmd->add_flag("--assert", args.assert_gate, "Exit nonzero when the sanity gate fails");
}

wasse::Scenario load_with_overrides(const CommonArgs& args) {
  wasse::Scenario sc = wasse::load_scenario(args.config);
  if (args.seed_set) sc.seed = args.seed;
  if (args.runs > 0) sc.runs = args.runs;
  if (args.steps > 0) sc.steps = args.steps;
  wasse::validate_scenario(sc);
  return sc;
}

void print_armse_table(const wasse::MonteCarloResult& result) {
  std::printf("%-6s %-10s %16s %16s\n", "bus", "quantity", "dmgst_vbukf", "ukf");
  for (std::size_t k = 0; k < result.components.size(); ++k) {
    const wasse::ComponentInfo& c = result.components[k];
    const double scale = c.is_angle ? kRadToDeg : 1.0;
    std::printf("%-6d %-10s", c.bus_id, c.is_angle ? "angle(deg)" : "magn(pu)");
    if (result.proposed) {
      std::printf(" %16.6f", result.proposed->armse[(Eigen::Index)k] * scale);
    } else {
      std::printf(" %16s", "-");
    }
    if (result.baseline) {
      std::printf(" %16.6f", result.baseline->armse[(Eigen::Index)k] * scale);
    } else {
      std::printf(" %16s", "-");
    }
    std::printf("\n");
  }
}

std::vector<double> parse_grid(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw wasse::ConfigError(what + ": cannot parse \"" + tok + "\" as a number");
    }
  }
  if (out.empty()) throw wasse::ConfigError(what + ": empty grid");
  return out;
}

int cmd_run(const CommonArgs& args) {
  wasse::Scenario sc = load_with_overrides(args);
  wasse::RunOptions opt;
  opt.threads = args.threads;
  opt.keep_truth = args.dump_truth;
  opt.keep_run_errors = !args.out_dir.empty();
  const wasse::MonteCarloResult result = wasse::run_monte_carlo(sc, opt);

  std::printf("scenario %s: %d/%d runs completed, %.2fs\n", sc.name.c_str(),
              result.completed_runs, result.requested_runs, result.diagnostics.wall_seconds);
  print_armse_table(result);
  if (!args.out_dir.empty()) {
    wasse::write_run_outputs(args.out_dir, result);
    std::printf("outputs written to %s\n", args.out_dir.c_str());
  }

  if (args.assert_gate) {
    if (!result.failed_runs.empty()) {
      std::fprintf(stderr, "assert: %zu run(s) failed\n", result.failed_runs.size());
      return 1;
    }
    if (result.proposed && result.baseline) {
      int better = 0;
      for (Eigen::Index k = 0; k < result.proposed->armse.size(); ++k) {
        if (result.proposed->armse[k] <= result.baseline->armse[k]) ++better;
      }
      if (2 * better < static_cast<int>(result.components.size())) {
        std::fprintf(stderr, "assert: proposed ARMSE beats baseline on only %d/%zu components\n",
                     better, result.components.size());
        return 1;
      }
    }
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& xi_csv, const std::string& gamma_csv) {
  wasse::Scenario sc = load_with_overrides(args);
  const std::vector<double> xis = parse_grid(xi_csv, "--xi");
  const std::vector<double> gammas = parse_grid(gamma_csv, "--gamma");
  wasse::RunOptions opt;
  opt.threads = args.threads;
  const wasse::SweepResult sweep = wasse::param_sweep(sc, xis, gammas, opt);

  std::printf("reference metric: phase ARMSE (deg) at the lowest-numbered bus\n");
  std::printf("%8s", "gamma\\xi");
  for (double x : xis) std::printf(" %10.3g", x);
  std::printf("\n");
  Eigen::Index min_g = 0, min_x = 0;
  sweep.reference_phase_armse.minCoeff(&min_g, &min_x);
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    std::printf("%8.3g", gammas[gi]);
    for (std::size_t xi = 0; xi < xis.size(); ++xi) {
      std::printf(" %10.6f", sweep.reference_phase_armse((Eigen::Index)gi, (Eigen::Index)xi));
    }
    std::printf("\n");
  }
  std::printf("minimum at gamma=%g, xi=%g\n", gammas[(std::size_t)min_g], xis[(std::size_t)min_x]);

  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    wasse::write_sweep_csv((std::filesystem::path(args.out_dir) / "sweep.csv").string(), sweep);
    std::printf("outputs written to %s\n", args.out_dir.c_str());
  }

  if (args.assert_gate) {
    // Trend gate: the best-performing shape must not sit at the grid's largest
    // xi (the heaviest-tailed settings should carry the benefit).
    if (xis[(std::size_t)min_x] >= *std::max_element(xis.begin(), xis.end())) {
      std::fprintf(stderr, "assert: sweep minimum sits at the largest xi\n");
      return 1;
    }
  }
  return 0;
}

int cmd_anomaly(const CommonArgs& args) {
  wasse::Scenario sc = load_with_overrides(args);
  wasse::RunOptions opt;
  opt.threads = args.threads;
  opt.keep_run_errors = !args.out_dir.empty();
  const wasse::AnomalyResult result = wasse::anomaly_experiment(sc, opt);

  std::printf("anomaly at step %d, region %d, factor %g\n", sc.anomaly.step, sc.anomaly.region,
              sc.anomaly.factor);
  std::printf("%-6s %-10s %12s %12s %14s %14s\n", "bus", "quantity", "ratio(prop)",
              "ratio(ukf)", "recov(prop)", "recov(ukf)");
  for (std::size_t k = 0; k < result.mc.components.size(); ++k) {
    const wasse::ComponentInfo& c = result.mc.components[k];
    if (c.region_id != sc.anomaly.region) continue;
    std::printf("%-6d %-10s", c.bus_id, c.is_angle ? "angle" : "magnitude");
    if (!result.proposed.empty()) {
      std::printf(" %12.3f", result.proposed[k].ratio);
    } else {
      std::printf(" %12s", "-");
    }
    if (!result.baseline.empty()) {
      std::printf(" %12.3f", result.baseline[k].ratio);
    } else {
      std::printf(" %12s", "-");
    }
    if (!result.proposed.empty()) {
      std::printf(" %14d", result.proposed[k].recovery_steps);
    } else {
      std::printf(" %14s", "-");
    }
    if (!result.baseline.empty()) {
      std::printf(" %14d\n", result.baseline[k].recovery_steps);
    } else {
      std::printf(" %14s\n", "-");
    }
  }

  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);
    wasse::write_anomaly_csv((dir / "anomaly.csv").string(), result);
    wasse::write_run_outputs(args.out_dir, result.mc);
    std::printf("outputs written to %s\n", args.out_dir.c_str());
  }

  if (args.assert_gate && !result.proposed.empty() && !result.baseline.empty()) {
    int total = 0, not_worse = 0, recovered = 0;
    for (std::size_t k = 0; k < result.mc.components.size(); ++k) {
      if (result.mc.components[k].region_id != sc.anomaly.region) continue;
      ++total;
      if (result.proposed[k].ratio <= result.baseline[k].ratio) ++not_worse;
      if (result.proposed[k].recovery_steps >= 0 && result.proposed[k].recovery_steps <= 15) {
        ++recovered;
      }
    }
    if (not_worse * 10 < total * 6) {
      std::fprintf(stderr, "assert: proposed spike ratio worse than baseline on %d/%d\n",
                   total - not_worse, total);
      return 1;
    }
    if (recovered * 10 < total * 6) {
      std::fprintf(stderr, "assert: recovery within 15 steps on only %d/%d components\n",
                   recovered, total);
      return 1;
    }
  }
  return 0;
}

int cmd_parse(const std::string& case_path, bool dump) {
  std::ifstream in(case_path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", case_path.c_str());
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const wasse::GridCase grid = wasse::parse_case(buf.str());
  std::printf("OK: %zu buses, %zu branches, baseMVA %g\n", grid.buses.size(),
              grid.branches.size(), grid.base_mva);
  if (dump) std::fputs(wasse::dump_case(grid).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wasse: wide-area power-system state-estimation benchmark"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, anomaly_args;
  std::string xi_csv = "1.8,1.9,2.0,2.1,2.2";
  std::string gamma_csv = "6,8,10,12,14";
  std::string case_path;
  bool parse_dump = false;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a Monte-Carlo experiment");
  add_common(run_cmd, run_args);
  run_cmd->add_flag("--dump-truth", run_args.dump_truth, "Also emit truth.csv");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Kernel parameter sweep");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--xi", xi_csv, "Comma-separated xi grid");
  sweep_cmd->add_option("--gamma", gamma_csv, "Comma-separated gamma grid");

  CLI::App* anomaly_cmd = app.add_subcommand("anomaly", "Measurement-anomaly experiment");
  add_common(anomaly_cmd, anomaly_args);

  CLI::App* parse_cmd = app.add_subcommand("parse", "Validate a grid case file");
  parse_cmd->add_option("--case", case_path, "Case file path")->required();
  parse_cmd->add_flag("--dump", parse_dump, "Print the normalized case text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, xi_csv, gamma_csv);
    if (anomaly_cmd->parsed()) return cmd_anomaly(anomaly_args);
    if (parse_cmd->parsed()) return cmd_parse(case_path, parse_dump);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
