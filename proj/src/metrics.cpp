#include "wasse/metrics.hpp"

#include <cmath>

#include "wasse/errors.hpp"

namespace wasse {

std::vector<ComponentInfo> component_layout(const PartitionedGrid& grid) {
  std::vector<ComponentInfo> out;
  for (const RegionModel& region : grid.regions) {
    for (const int bus : region.bus_ids) {
      out.push_back({region.region_id, bus, false});
      out.push_back({region.region_id, bus, true});
    }
  }
  return out;
}

double rmse(const Eigen::VectorXd& errors) {
  if (errors.size() == 0) throw DimensionMismatch("rmse: empty error vector");
  return std::sqrt(errors.squaredNorm() / static_cast<double>(errors.size()));
}

double armse(const Eigen::VectorXd& rmse_series) {
  if (rmse_series.size() == 0) throw DimensionMismatch("armse: empty series");
  return rmse_series.mean();
}

ErrorAccumulator::ErrorAccumulator(int steps, int components) {
  if (steps < 1 || components < 1) {
    throw DimensionMismatch("ErrorAccumulator: steps and components must be >= 1");
  }
  sum_sq_ = Eigen::MatrixXd::Zero(steps, components);
}

void ErrorAccumulator::add_run(const Eigen::MatrixXd& errors) {
  if (errors.rows() != sum_sq_.rows() || errors.cols() != sum_sq_.cols()) {
    throw DimensionMismatch("ErrorAccumulator: run error matrix has wrong shape");
  }
  sum_sq_ += errors.cwiseProduct(errors);
  ++runs_;
}

Eigen::MatrixXd ErrorAccumulator::rmse_table() const {
  if (runs_ == 0) throw DimensionMismatch("ErrorAccumulator: no completed runs");
  return (sum_sq_ / static_cast<double>(runs_)).cwiseSqrt();
}

Eigen::VectorXd ErrorAccumulator::armse_table() const {
  return rmse_table().colwise().mean();
}

}  // namespace wasse
