#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "wasse/grid_model.hpp"
#include "wasse/noise.hpp"

namespace wasse {

/// Noise specs per measurement channel class.
struct NoiseSuite {
  NoiseSpec scada_v = NoiseSpec::gaussian(0.0, 1e-3);
  NoiseSpec scada_pq = NoiseSpec::gaussian(0.0, 1e-3);
  NoiseSpec pmu = NoiseSpec::gaussian(0.0, 1e-3);
  NoiseSpec edge = NoiseSpec::gaussian(0.0, 1e-3);
};

/// Measurements one region receives at one step: its own channel vector plus
/// one edge vector per neighbor. Edge vectors for a pair are generated once
/// and copied to both owners, so the copies only diverge if an anomaly is
/// injected into one region.
struct MeasurementFrame {
  Eigen::VectorXd z;
  std::map<int, Eigen::VectorXd> edge;  ///< neighbor region id -> edge measurement
};

/// Substream channel tags (part of the RNG path; keep values stable).
enum class NoiseChannel : std::uint64_t {
  kProcess = 0,
  kScadaV = 1,
  kScadaPq = 2,
  kPmu = 3,
  kEdge = 4,
};

/// One mean-reverting state transition: F v + (I - F) vbar + q, q ~ N(0, Q).
Eigen::VectorXd step_state(const RegionModel& region, const Eigen::VectorXd& prev,
                           RngStream& rng);

/// Build the measurement frames for all regions at one step from the true
/// states (indexed like grid.regions). Substreams are derived per
/// (run, region, step, channel class) from the master seed.
std::vector<MeasurementFrame> assemble_frames(const PartitionedGrid& grid,
                                              const std::vector<Eigen::VectorXd>& states,
                                              const NoiseSuite& suite, std::uint64_t master_seed,
                                              std::uint64_t run, std::uint64_t step);

/// Scale every measurement owned by `region_id` (its channel vector and its
/// copies of the edge vectors) by `factor`. Throws NoSuchRegion / ConfigError.
void inject_anomaly(std::vector<MeasurementFrame>& frames, const PartitionedGrid& grid,
                    int region_id, double factor);

/// True states and frames for one Monte-Carlo run. states[0] holds the steady
/// state; states[m] and frames[m-1] belong to step m (m = 1..steps).
struct Trajectory {
  std::vector<std::vector<Eigen::VectorXd>> states;
  std::vector<std::vector<MeasurementFrame>> frames;
};

Trajectory simulate(const PartitionedGrid& grid, const NoiseSuite& suite, int steps,
                    std::uint64_t master_seed, std::uint64_t run);

}  // namespace wasse
