#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wasse/grid_model.hpp"

namespace wasse {

/// One scalar state component in the global reporting order: regions in
/// ascending id, buses ascending within a region, [magnitude, angle] per bus.
struct ComponentInfo {
  int region_id = 0;
  int bus_id = 0;
  bool is_angle = false;
};

std::vector<ComponentInfo> component_layout(const PartitionedGrid& grid);

/// Cross-run root-mean-square of a vector of per-run errors at one step.
double rmse(const Eigen::VectorXd& errors);

/// Time average of a per-step RMSE series.
double armse(const Eigen::VectorXd& rmse_series);

/// Accumulates per-run signed error matrices (steps x components) and reduces
/// them to RMSE/ARMSE. add_run must be called in a fixed order (the harness
/// adds completed runs by ascending run index) so reductions are
/// bit-deterministic regardless of thread count.
class ErrorAccumulator {
 public:
  ErrorAccumulator(int steps, int components);

  void add_run(const Eigen::MatrixXd& errors);  ///< throws DimensionMismatch
  int runs() const { return runs_; }

  Eigen::MatrixXd rmse_table() const;   ///< steps x components; throws if no runs
  Eigen::VectorXd armse_table() const;  ///< per component

 private:
  Eigen::MatrixXd sum_sq_;
  int runs_ = 0;
};

}  // namespace wasse
