#include "wasse/truth_sim.hpp"

#include "wasse/errors.hpp"

namespace wasse {

namespace {
std::uint64_t tag(NoiseChannel c) { return static_cast<std::uint64_t>(c); }
std::uint64_t utag(int region_id) { return static_cast<std::uint64_t>(region_id); }
}  // namespace

Eigen::VectorXd step_state(const RegionModel& region, const Eigen::VectorXd& prev,
                           RngStream& rng) {
  if (prev.size() != region.alpha()) {
    throw DimensionMismatch("step_state: state dimension mismatch");
  }
  const Eigen::VectorXd drift = region.F * prev + region.G * region.steady_state;
  const Eigen::VectorXd q =
      sample_gaussian_vector(Eigen::VectorXd::Zero(prev.size()), region.Q, rng);
  return drift + q;
}

std::vector<MeasurementFrame> assemble_frames(const PartitionedGrid& grid,
                                              const std::vector<Eigen::VectorXd>& states,
                                              const NoiseSuite& suite, std::uint64_t master_seed,
                                              std::uint64_t run, std::uint64_t step) {
  if (states.size() != grid.regions.size()) {
    throw DimensionMismatch("assemble_frames: one state vector per region required");
  }
  std::vector<MeasurementFrame> frames(grid.regions.size());
  for (std::size_t i = 0; i < grid.regions.size(); ++i) {
    const RegionModel& region = grid.regions[i];
    const auto layout = region.layout();
    Eigen::VectorXd z = region.measure(states[i]);

    RngStream rng_v(master_seed, {run, utag(region.region_id), step, tag(NoiseChannel::kScadaV)});
    RngStream rng_pq(master_seed,
                     {run, utag(region.region_id), step, tag(NoiseChannel::kScadaPq)});
    RngStream rng_pmu(master_seed, {run, utag(region.region_id), step, tag(NoiseChannel::kPmu)});
    z.segment(layout.scada_v_begin, layout.scada_v_end - layout.scada_v_begin) +=
        sample(suite.scada_v, layout.scada_v_end - layout.scada_v_begin, rng_v);
    z.segment(layout.flow_begin, layout.flow_end - layout.flow_begin) +=
        sample(suite.scada_pq, layout.flow_end - layout.flow_begin, rng_pq);
    z.segment(layout.pmu_begin, layout.pmu_end - layout.pmu_begin) +=
        sample(suite.pmu, layout.pmu_end - layout.pmu_begin, rng_pmu);
    frames[i].z = std::move(z);
  }

  // One draw per region pair; both owners store the same vector.
  for (const auto& [key, list] : grid.edges) {
    const auto [a, b] = key;
    const Eigen::Index ia = a - 1, ib = b - 1;
    Eigen::VectorXd h = grid.eval_edge(key, states[ia], states[ib]);
    RngStream rng_e(master_seed, {run, utag(a), utag(b), step, tag(NoiseChannel::kEdge)});
    h += sample(suite.edge, static_cast<int>(h.size()), rng_e);
    frames[ia].edge[b] = h;
    frames[ib].edge[a] = h;
    (void)list;
  }
  return frames;
}

void inject_anomaly(std::vector<MeasurementFrame>& frames, const PartitionedGrid& grid,
                    int region_id, double factor) {
  if (!(factor > 0.0)) throw ConfigError("anomaly factor must be positive");
  Eigen::Index idx = -1;
  for (std::size_t i = 0; i < grid.regions.size(); ++i) {
    if (grid.regions[i].region_id == region_id) idx = static_cast<Eigen::Index>(i);
  }
  if (idx < 0) throw NoSuchRegion("anomaly targets unknown region " + std::to_string(region_id));
  if (frames.size() != grid.regions.size()) {
    throw DimensionMismatch("inject_anomaly: frame set size mismatch");
  }
  frames[idx].z *= factor;
  for (auto& [neighbor, vec] : frames[idx].edge) {
    (void)neighbor;
    vec *= factor;
  }
}

Trajectory simulate(const PartitionedGrid& grid, const NoiseSuite& suite, int steps,
                    std::uint64_t master_seed, std::uint64_t run) {
  if (steps < 0) throw ConfigError("simulate: steps must be >= 0");
  Trajectory traj;
  traj.states.reserve(steps + 1);
  traj.frames.reserve(steps);

  std::vector<Eigen::VectorXd> current;
  current.reserve(grid.regions.size());
  for (const auto& region : grid.regions) current.push_back(region.steady_state);
  traj.states.push_back(current);

  for (int m = 1; m <= steps; ++m) {
    for (std::size_t i = 0; i < grid.regions.size(); ++i) {
      const RegionModel& region = grid.regions[i];
      RngStream rng(master_seed, {run, utag(region.region_id), static_cast<std::uint64_t>(m),
                                  tag(NoiseChannel::kProcess)});
      current[i] = step_state(region, current[i], rng);
    }
    traj.states.push_back(current);
    traj.frames.push_back(assemble_frames(grid, current, suite, master_seed, run,
                                          static_cast<std::uint64_t>(m)));
  }
  return traj;
}

}  // namespace wasse
