#pragma once

#include <map>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wasse/case_parser.hpp"

namespace wasse {

/// Branch power flow measured at bus k towards bus j (pi-model):
///   P = Uk^2 (gs + g) - Uk Uj (g cos d + b sin d)
///   Q = -Uk^2 (bs + b) - Uk Uj (g sin d - b cos d),  d = th_k - th_j
/// (g, b) series admittance, (gs, bs) shunt at k.
std::pair<double, double> measure_power_flow(const Eigen::Vector2d& vk,
                                             const Eigen::Vector2d& vj, double g, double b,
                                             double gs, double bs);

/// SCADA voltage-magnitude channel: picks U out of [U, theta].
double measure_scada_voltage(const Eigen::Vector2d& v);

/// PMU phasor channel: both components of [U, theta].
Eigen::Vector2d measure_pmu(const Eigen::Vector2d& v);

/// Per-bus dynamics parameters. Each bus evolves as
///   v_k(m) = F_k v_k(m-1) + (I - F_k) vbar_k + q_k,  q_k ~ N(0, Q_k)
/// with F_k = f*I2 and Q_k = q_var*I2; per-bus overrides optional.
struct ModelParams {
  double f = 0.89;
  double q_var = 1e-4;  // (0.01)^2
  std::map<int, double> f_override;
  std::map<int, double> q_var_override;
};

/// A branch measured inside one region (both endpoints local).
struct FlowBranch {
  int from_local = 0;  ///< index into the region's bus list
  int to_local = 0;
  int from_bus = 0;  ///< original bus ids (for reporting)
  int to_bus = 0;
  double g = 0.0, b = 0.0, gs = 0.0, bs = 0.0;
};

/// One region of the partitioned grid. State vector stacks [U, theta] per bus
/// in ascending bus-id order; alpha = 2 * bus count.
struct RegionModel {
  int region_id = 0;
  std::vector<int> bus_ids;  ///< ascending
  Eigen::MatrixXd F, G, Q;
  Eigen::VectorXd steady_state;
  std::vector<FlowBranch> flow_branches;  ///< intra-region SCADA P/Q branches, file order
  std::vector<int> pmu_buses;             ///< ascending bus ids

  int alpha() const { return static_cast<int>(2 * bus_ids.size()); }
  int beta() const {
    return static_cast<int>(bus_ids.size() + 2 * flow_branches.size() + 2 * pmu_buses.size());
  }
  int local_index(int bus_id) const;  ///< throws Error when absent

  /// Measurement layout: SCADA voltage magnitudes (bus order), then P/Q pairs
  /// per flow branch (file order), then PMU [U, theta] pairs (bus order).
  struct Layout {
    int scada_v_begin = 0, scada_v_end = 0;
    int flow_begin = 0, flow_end = 0;
    int pmu_begin = 0, pmu_end = 0;
  };
  Layout layout() const;

  /// Full measurement function h(v) following `layout()`.
  Eigen::VectorXd measure(const Eigen::VectorXd& v) const;
};

/// Branch crossing two regions; the flow is measured at the case-file from
/// side, so both regions book the same physical quantity.
struct EdgeBranch {
  int from_region = 0, to_region = 0;  ///< region ids of the two endpoints
  int from_local = 0, to_local = 0;    ///< local bus indices in their regions
  int from_bus = 0, to_bus = 0;
  double g = 0.0, b = 0.0, gs = 0.0, bs = 0.0;
};

struct Placement {
  /// PMU buses per region id; when empty each region gets one PMU at its
  /// lowest-numbered bus.
  std::map<int, std::vector<int>> pmu;
};

struct PartitionedGrid {
  std::vector<RegionModel> regions;  ///< ascending region id
  /// Edge branch lists keyed by (min region id, max region id), file order.
  std::map<std::pair<int, int>, std::vector<EdgeBranch>> edges;
  std::map<int, std::set<int>> neighbors;  ///< region id -> neighbor region ids

  const RegionModel& region(int region_id) const;  ///< throws NoSuchRegion
  int region_of_bus(int bus_id) const;             ///< throws UnassignedBus

  /// Edge measurement vector h_ab(v_a, v_b) for the pair key (a < b):
  /// P/Q per edge branch, measured at the branch's from side.
  Eigen::VectorXd eval_edge(const std::pair<int, int>& pair_key, const Eigen::VectorXd& v_a,
                            const Eigen::VectorXd& v_b) const;
};

/// Partition `grid` by the bus -> region assignment. Every bus must be
/// assigned (UnassignedBus), region ids must be 1..N with no gaps
/// (EmptyRegion). SCADA P/Q covers every intra-region branch.
PartitionedGrid build_partition(const GridCase& grid, const std::map<int, int>& bus_to_region,
                                const ModelParams& params = {}, const Placement& placement = {});

/// Default partitions for the bundled cases (3 regions on ieee14, 4 on ieee39).
std::map<int, int> default_partition(std::string_view case_name);

}  // namespace wasse
