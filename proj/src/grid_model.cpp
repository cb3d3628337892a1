#include "wasse/grid_model.hpp"

#include <algorithm>
#include <cmath>

#include "wasse/errors.hpp"

namespace wasse {

std::pair<double, double> measure_power_flow(const Eigen::Vector2d& vk,
                                             const Eigen::Vector2d& vj, double g, double b,
                                             double gs, double bs) {
  const double uk = vk[0], uj = vj[0];
  const double d = vk[1] - vj[1];
  const double cd = std::cos(d), sd = std::sin(d);
  const double p = uk * uk * (gs + g) - uk * uj * (g * cd + b * sd);
  const double q = -uk * uk * (bs + b) - uk * uj * (g * sd - b * cd);
  return {p, q};
}

double measure_scada_voltage(const Eigen::Vector2d& v) { return v[0]; }

Eigen::Vector2d measure_pmu(const Eigen::Vector2d& v) { return v; }

int RegionModel::local_index(int bus_id) const {
  auto it = std::lower_bound(bus_ids.begin(), bus_ids.end(), bus_id);
  if (it == bus_ids.end() || *it != bus_id) {
    throw Error("bus " + std::to_string(bus_id) + " is not in region " +
                std::to_string(region_id));
  }
  return static_cast<int>(it - bus_ids.begin());
}

RegionModel::Layout RegionModel::layout() const {
  Layout l;
  const int tau = static_cast<int>(bus_ids.size());
  l.scada_v_begin = 0;
  l.scada_v_end = tau;
  l.flow_begin = tau;
  l.flow_end = tau + 2 * static_cast<int>(flow_branches.size());
  l.pmu_begin = l.flow_end;
  l.pmu_end = l.pmu_begin + 2 * static_cast<int>(pmu_buses.size());
  return l;
}

Eigen::VectorXd RegionModel::measure(const Eigen::VectorXd& v) const {
  if (v.size() != alpha()) {
    throw DimensionMismatch("RegionModel::measure: state dimension mismatch");
  }
  Eigen::VectorXd z(beta());
  int at = 0;
  for (std::size_t t = 0; t < bus_ids.size(); ++t) {
    z[at++] = measure_scada_voltage(v.segment<2>(2 * static_cast<int>(t)));
  }
  for (const auto& fb : flow_branches) {
    const auto [p, q] = measure_power_flow(v.segment<2>(2 * fb.from_local),
                                           v.segment<2>(2 * fb.to_local), fb.g, fb.b, fb.gs,
                                           fb.bs);
    z[at++] = p;
    z[at++] = q;
  }
  for (int bus : pmu_buses) {
    const int t = local_index(bus);
    z.segment<2>(at) = measure_pmu(v.segment<2>(2 * t));
    at += 2;
  }
  return z;
}

const RegionModel& PartitionedGrid::region(int region_id) const {
  for (const auto& r : regions) {
    if (r.region_id == region_id) return r;
  }
  throw NoSuchRegion("no region with id " + std::to_string(region_id));
}

int PartitionedGrid::region_of_bus(int bus_id) const {
  for (const auto& r : regions) {
    if (std::binary_search(r.bus_ids.begin(), r.bus_ids.end(), bus_id)) return r.region_id;
  }
  throw UnassignedBus("bus " + std::to_string(bus_id) + " belongs to no region");
}

Eigen::VectorXd PartitionedGrid::eval_edge(const std::pair<int, int>& pair_key,
                                           const Eigen::VectorXd& v_a,
                                           const Eigen::VectorXd& v_b) const {
  auto it = edges.find(pair_key);
  if (it == edges.end()) {
    throw NoSuchRegion("no edge list for region pair (" + std::to_string(pair_key.first) +
                       ", " + std::to_string(pair_key.second) + ")");
  }
  const auto& list = it->second;
  Eigen::VectorXd z(2 * static_cast<Eigen::Index>(list.size()));
  int at = 0;
  for (const auto& eb : list) {
    const Eigen::VectorXd& v_from = (eb.from_region == pair_key.first) ? v_a : v_b;
    const Eigen::VectorXd& v_to = (eb.to_region == pair_key.first) ? v_a : v_b;
    const auto [p, q] = measure_power_flow(v_from.segment<2>(2 * eb.from_local),
                                           v_to.segment<2>(2 * eb.to_local), eb.g, eb.b, eb.gs,
                                           eb.bs);
    z[at++] = p;
    z[at++] = q;
  }
  return z;
}

PartitionedGrid build_partition(const GridCase& grid, const std::map<int, int>& bus_to_region,
                                const ModelParams& params, const Placement& placement) {
  // Validate the assignment covers the case and the region ids are 1..N.
  std::set<int> region_ids;
  for (const auto& bus : grid.buses) {
    auto it = bus_to_region.find(bus.id);
    if (it == bus_to_region.end()) {
      throw UnassignedBus("bus " + std::to_string(bus.id) + " has no region assignment");
    }
    if (it->second <= 0) {
      throw EmptyRegion("region ids must be positive, got " + std::to_string(it->second));
    }
    region_ids.insert(it->second);
  }
  for (const auto& [bus_id, region] : bus_to_region) {
    if (!grid.has_bus(bus_id)) {
      throw UnassignedBus("assignment references unknown bus " + std::to_string(bus_id));
    }
    (void)region;
  }
  const int n_regions = *region_ids.rbegin();
  for (int r = 1; r <= n_regions; ++r) {
    if (!region_ids.count(r)) {
      throw EmptyRegion("region " + std::to_string(r) + " has no buses");
    }
  }

  PartitionedGrid pg;
  pg.regions.resize(n_regions);
  for (int r = 1; r <= n_regions; ++r) pg.regions[r - 1].region_id = r;
  for (const auto& bus : grid.buses) {
    pg.regions[bus_to_region.at(bus.id) - 1].bus_ids.push_back(bus.id);
  }
  for (auto& region : pg.regions) {
    std::sort(region.bus_ids.begin(), region.bus_ids.end());
    const int tau = static_cast<int>(region.bus_ids.size());
    region.F = Eigen::MatrixXd::Zero(2 * tau, 2 * tau);
    region.Q = Eigen::MatrixXd::Zero(2 * tau, 2 * tau);
    region.steady_state.resize(2 * tau);
    for (int t = 0; t < tau; ++t) {
      const int id = region.bus_ids[t];
      auto fit = params.f_override.find(id);
      auto qit = params.q_var_override.find(id);
      const double f = (fit != params.f_override.end()) ? fit->second : params.f;
      const double qv = (qit != params.q_var_override.end()) ? qit->second : params.q_var;
      region.F.block<2, 2>(2 * t, 2 * t) = f * Eigen::Matrix2d::Identity();
      region.Q.block<2, 2>(2 * t, 2 * t) = qv * Eigen::Matrix2d::Identity();
      const BusRecord& bus = grid.bus(id);
      region.steady_state[2 * t] = bus.nominal_voltage;
      region.steady_state[2 * t + 1] = bus.nominal_angle;
    }
    region.G = Eigen::MatrixXd::Identity(2 * tau, 2 * tau) - region.F;
  }

  // Distribute branches: intra-region -> SCADA flow channels, cross-region ->
  // edge lists keyed (min region, max region). Case-file order is preserved.
  for (const auto& br : grid.branches) {
    const int ra = bus_to_region.at(br.from_bus);
    const int rb = bus_to_region.at(br.to_bus);
    const auto [g, b, gs, bs] = branch_admittance(grid, br.from_bus, br.to_bus);
    if (ra == rb) {
      RegionModel& region = pg.regions[ra - 1];
      FlowBranch fb;
      fb.from_bus = br.from_bus;
      fb.to_bus = br.to_bus;
      fb.from_local = region.local_index(br.from_bus);
      fb.to_local = region.local_index(br.to_bus);
      fb.g = g;
      fb.b = b;
      fb.gs = gs;
      fb.bs = bs;
      region.flow_branches.push_back(fb);
    } else {
      EdgeBranch eb;
      eb.from_region = ra;
      eb.to_region = rb;
      eb.from_bus = br.from_bus;
      eb.to_bus = br.to_bus;
      eb.from_local = pg.regions[ra - 1].local_index(br.from_bus);
      eb.to_local = pg.regions[rb - 1].local_index(br.to_bus);
      eb.g = g;
      eb.b = b;
      eb.gs = gs;
      eb.bs = bs;
      pg.edges[{std::min(ra, rb), std::max(ra, rb)}].push_back(eb);
      pg.neighbors[ra].insert(rb);
      pg.neighbors[rb].insert(ra);
    }
  }

  for (auto& region : pg.regions) {
    auto it = placement.pmu.find(region.region_id);
    if (it != placement.pmu.end()) {
      region.pmu_buses = it->second;
      std::sort(region.pmu_buses.begin(), region.pmu_buses.end());
      for (int bus : region.pmu_buses) (void)region.local_index(bus);
    } else {
      region.pmu_buses = {region.bus_ids.front()};
    }
  }
  return pg;
}

std::map<int, int> default_partition(std::string_view case_name) {
  std::map<int, int> m;
  auto assign = [&m](std::initializer_list<int> buses, int region) {
    for (int b : buses) m[b] = region;
  };
  if (case_name == "ieee14") {
    assign({1, 2, 3, 4, 5}, 1);
    assign({6, 11, 12, 13}, 2);
    assign({7, 8, 9, 10, 14}, 3);
  } else if (case_name == "ieee39") {
    assign({1, 2, 3, 18, 25, 26, 27, 28, 29, 30, 37, 38}, 1);
    assign({4, 5, 6, 7, 8, 9, 31, 39}, 2);
    assign({10, 11, 12, 13, 14, 15, 32}, 3);
    assign({16, 17, 19, 20, 21, 22, 23, 24, 33, 34, 35, 36}, 4);
  } else {
    throw ConfigError("no default partition for case: " + std::string(case_name));
  }
  return m;
}

}  // namespace wasse
