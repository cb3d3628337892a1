#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wasse/grid_model.hpp"
#include "wasse/vb_ukf.hpp"

namespace wasse {

/// What one region broadcasts to its neighbors after its local step: the
/// predicted (pre-correction) mean/covariance with the sigma points drawn from
/// them, plus the local posterior in information form.
struct NeighborSummary {
  int region_id = 0;
  Eigen::VectorXd prior_mean;
  Eigen::MatrixXd prior_P;
  Eigen::MatrixXd prior_sigma_points;  ///< alpha x (2 alpha + 1)
  Eigen::VectorXd chi;                 ///< information vector C v
  Eigen::MatrixXd C;                   ///< information matrix P^-1
};

/// Package the broadcastable part of a local estimator state.
NeighborSummary exchange(int region_id, const EstimatorState& state);

/// Reference point for the neighbor correction term in the fused measurement:
/// either the mean reconstructed from the transmitted information pair
/// (C^-1 chi, the neighbor's local posterior) or the transmitted prior mean.
enum class NeighborReference { kReconstructed, kPriorMean };

struct FusionSettings {
  UtParams ut{};
  NeighborReference reference = NeighborReference::kReconstructed;
};

/// One boundary measurement shared with a single neighbor. `h(v_own, v_nb)`
/// evaluates the edge channels from the two regional states; `R` is the
/// nominal edge noise covariance (never estimated by the local filter).
struct EdgeMeasurement {
  Eigen::VectorXd z;
  NeighborSummary neighbor;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> h;
  Eigen::MatrixXd R;
};

/// Edge measurement map for a concrete grid pair, ordered as the receiving
/// region expects: h(v_own, v_nb) regardless of which region id is smaller.
struct EdgeModel {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> h;
};
EdgeModel make_edge_model(const PartitionedGrid& grid, int own_region, int nb_region);

/// Fuse the local posterior with the boundary measurements. Each edge is
/// linearized statistically on both sides from the transmitted prior sigma
/// points; the neighbor's state uncertainty is folded into the effective edge
/// noise, and the update is applied in information form. With no edges the
/// input state is returned unchanged. Only v, P, chi, C change; the cached
/// prediction artifacts pass through for the next broadcast.
EstimatorState fuse(const EstimatorState& local, const std::vector<EdgeMeasurement>& edges,
                    const FusionSettings& settings = {});

/// Flat binary wire format for a NeighborSummary (magic "WSUM", version 1,
/// little-endian doubles, column-major matrices). Round-trips exactly.
std::string serialize_summary(const NeighborSummary& summary);
NeighborSummary deserialize_summary(const std::string& bytes);

}  // namespace wasse
