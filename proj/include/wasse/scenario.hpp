#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "wasse/fusion.hpp"
#include "wasse/grid_model.hpp"
#include "wasse/truth_sim.hpp"
#include "wasse/vb_ukf.hpp"

namespace wasse {

/// Which estimators a Monte-Carlo run executes.
enum class Algorithm { kProposed, kBaseline, kBoth };

/// Scenario-level fusion switches (the per-edge math lives in fusion.hpp).
struct FusionConfig {
  bool enabled = true;
  /// Fused state feeds the next prediction (true) or is report-only (false).
  bool closed_loop = true;
  NeighborReference reference = NeighborReference::kReconstructed;
  double edge_variance = 1e-3;  ///< nominal edge-noise variance assumed by the filter
};

struct BaselineConfig {
  /// Fixed R policy: per-channel true mixture variance of the scenario noise
  /// (an offline-variance-matched filter) or the nominal init_R value.
  enum class RPolicy { kTrueVariance, kNominal };
  RPolicy r_policy = RPolicy::kTrueVariance;
};

struct AnomalyConfig {
  bool enabled = false;
  int step = 55;
  int region = 1;
  double factor = 0.75;
};

/// Everything one experiment needs. JSON keys mirror the field names; see
/// configs/ for examples and README.md for the schema.
struct Scenario {
  std::string name = "default";
  std::string case_name = "ieee14";  ///< bundled case, ignored when case_file set
  std::string case_file;             ///< optional path to a case text
  std::map<int, int> partition;      ///< bus -> region; empty = bundled default
  ModelParams model;
  Placement placement;
  NoiseSuite noise;
  EstimatorConfig estimator;
  FusionConfig fusion;
  BaselineConfig baseline;
  Algorithm algorithm = Algorithm::kBoth;
  int steps = 100;
  int runs = 100;
  std::uint64_t seed = 42;
  AnomalyConfig anomaly;
};

/// Strict parsers: unknown keys, wrong types, and out-of-range values all
/// throw ConfigError with the offending key in the message.
NoiseSpec noise_spec_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json noise_spec_to_json(const NoiseSpec& spec);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

/// Range checks that do not need the grid (steps/runs/anomaly/estimator).
void validate_scenario(const Scenario& s);

/// Load the case (bundled or file), build the partition, default the
/// placement. Throws the underlying parser/partition errors.
PartitionedGrid build_scenario_grid(const Scenario& s);

}  // namespace wasse
