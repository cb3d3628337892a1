#include "wasse/fusion.hpp"

#include <cstdint>
#include <cstring>

#include "wasse/errors.hpp"
#include "wasse/linalg.hpp"

namespace wasse {

NeighborSummary exchange(int region_id, const EstimatorState& state) {
  NeighborSummary s;
  s.region_id = region_id;
  s.prior_mean = state.prior_v;
  s.prior_P = state.prior_P;
  s.prior_sigma_points = state.prior_sigma_points;
  s.chi = state.chi;
  s.C = state.C;
  return s;
}

EdgeModel make_edge_model(const PartitionedGrid& grid, int own_region, int nb_region) {
  const std::pair<int, int> key{std::min(own_region, nb_region),
                                std::max(own_region, nb_region)};
  const auto it = grid.edges.find(key);
  if (it == grid.edges.end() || it->second.empty()) {
    throw NoSuchRegion("make_edge_model: regions " + std::to_string(own_region) + " and " +
                       std::to_string(nb_region) + " share no edge branches");
  }
  EdgeModel m;
  m.dim = static_cast<int>(2 * it->second.size());
  const PartitionedGrid* g = &grid;
  if (own_region == key.first) {
    m.h = [g, key](const Eigen::VectorXd& v_own, const Eigen::VectorXd& v_nb) {
      return g->eval_edge(key, v_own, v_nb);
    };
  } else {
    m.h = [g, key](const Eigen::VectorXd& v_own, const Eigen::VectorXd& v_nb) {
      return g->eval_edge(key, v_nb, v_own);
    };
  }
  return m;
}

namespace {

struct SideLinearization {
  Eigen::VectorXd zhat;
  Eigen::MatrixXd H;
  Eigen::MatrixXd E;  ///< linearization residual, PSD
};

/// Statistical linearization of z = f(v) from sigma points of (mean, P).
SideLinearization linearize_side(const Eigen::MatrixXd& pts, const Eigen::VectorXd& mean,
                                 const Eigen::MatrixXd& P, const UtWeights& w,
                                 const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 int zdim) {
  Eigen::MatrixXd Z(zdim, pts.cols());
  for (Eigen::Index k = 0; k < pts.cols(); ++k) {
    Eigen::VectorXd zk = f(pts.col(k));
    if (zk.size() != zdim) {
      throw DimensionMismatch("fuse: edge map returned wrong dimension");
    }
    Z.col(k) = zk;
  }
  SideLinearization out;
  out.zhat = Z * w.wv;
  Eigen::MatrixXd Pvz = Eigen::MatrixXd::Zero(mean.size(), zdim);
  Eigen::MatrixXd Pzz = Eigen::MatrixXd::Zero(zdim, zdim);
  for (Eigen::Index k = 0; k < pts.cols(); ++k) {
    const Eigen::VectorXd dv = pts.col(k) - mean;
    const Eigen::VectorXd dz = Z.col(k) - out.zhat;
    Pvz += w.wc[k] * dv * dz.transpose();
    Pzz += w.wc[k] * dz * dz.transpose();
  }
  const Eigen::MatrixXd Pinv = spd_inverse(P);
  out.H = Pvz.transpose() * Pinv;
  out.E = clip_psd(Pzz - out.H * symmetrized(P) * out.H.transpose());
  return out;
}

}  // namespace

EstimatorState fuse(const EstimatorState& local, const std::vector<EdgeMeasurement>& edges,
                    const FusionSettings& settings) {
  if (edges.empty()) return local;

  const int alpha = static_cast<int>(local.prior_v.size());
  const UtWeights w_own = ut_weights(alpha, settings.ut);
  if (local.prior_sigma_points.rows() != alpha ||
      local.prior_sigma_points.cols() != 2 * alpha + 1) {
    throw DimensionMismatch("fuse: cached prior sigma points have wrong shape");
  }

  Eigen::MatrixXd C_f = symmetrized(local.C);
  Eigen::VectorXd chi_f = local.chi;

  for (const EdgeMeasurement& edge : edges) {
    const NeighborSummary& nb = edge.neighbor;
    const int zdim = static_cast<int>(edge.z.size());
    const int alpha_nb = static_cast<int>(nb.prior_mean.size());
    if (edge.R.rows() != zdim || edge.R.cols() != zdim) {
      throw DimensionMismatch("fuse: edge noise covariance has wrong shape");
    }
    if (nb.prior_sigma_points.rows() != alpha_nb ||
        nb.prior_sigma_points.cols() != 2 * alpha_nb + 1) {
      throw DimensionMismatch("fuse: neighbor sigma points have wrong shape");
    }
    const UtWeights w_nb = ut_weights(alpha_nb, settings.ut);

    // Own-side linearization: neighbor held at its transmitted prior mean.
    const SideLinearization own = linearize_side(
        local.prior_sigma_points, local.prior_v, local.prior_P, w_own,
        [&](const Eigen::VectorXd& v) { return edge.h(v, nb.prior_mean); }, zdim);
    // Neighbor-side linearization: own state held at its prior mean.
    const SideLinearization other = linearize_side(
        nb.prior_sigma_points, nb.prior_mean, nb.prior_P, w_nb,
        [&](const Eigen::VectorXd& v) { return edge.h(local.prior_v, v); }, zdim);

    // Neighbor posterior covariance and reference point.
    const Eigen::MatrixXd P_nb = spd_inverse(symmetrized(nb.C));
    const Eigen::VectorXd vhat_nb = settings.reference == NeighborReference::kReconstructed
                                        ? Eigen::VectorXd(P_nb * nb.chi)
                                        : nb.prior_mean;

    // Effective noise: nominal edge noise + both linearization residuals +
    // the neighbor's state uncertainty pushed through its edge slope.
    const Eigen::MatrixXd Ebar = symmetrized(edge.R + own.E + other.E +
                                             other.H * P_nb * other.H.transpose());
    // Pseudo-measurement of H_own v around the joint prior-mean evaluation.
    const Eigen::VectorXd z_center = edge.h(local.prior_v, nb.prior_mean);
    const Eigen::VectorXd ztilde = edge.z - z_center + own.H * local.prior_v +
                                   other.H * (nb.prior_mean - vhat_nb);

    const Eigen::MatrixXd Einv = spd_inverse(Ebar);
    C_f += own.H.transpose() * Einv * own.H;
    chi_f += own.H.transpose() * Einv * ztilde;
  }

  C_f = symmetrized(C_f);
  Eigen::MatrixXd P_f;
  try {
    P_f = spd_inverse(C_f);
  } catch (const CholeskyFailure&) {
    throw SingularFusedInformation("fuse: fused information matrix is not invertible");
  }
  if (!all_finite(P_f) || !all_finite(chi_f)) {
    throw SingularFusedInformation("fuse: fused state is not finite");
  }

  EstimatorState out = local;
  out.C = C_f;
  out.chi = chi_f;
  out.P = symmetrized(P_f);
  out.v = P_f * chi_f;
  return out;
}

namespace {

constexpr char kMagic[4] = {'W', 'S', 'U', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

template <typename T>
void put_pod(std::string& out, T v) {
  put_bytes(out, &v, sizeof(T));
}

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
  put_pod<std::int64_t>(out, m.rows());
  put_pod<std::int64_t>(out, m.cols());
  put_bytes(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void take(void* p, std::size_t n) {
    if (pos + n > buf.size()) throw Error("summary: truncated buffer");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  template <typename T>
  T pod() {
    T v;
    take(&v, sizeof(T));
    return v;
  }
  Eigen::MatrixXd matrix() {
    const auto rows = pod<std::int64_t>();
    const auto cols = pod<std::int64_t>();
    if (rows < 0 || cols < 0 || rows > 1 << 20 || cols > 1 << 20) {
      throw Error("summary: implausible matrix shape");
    }
    Eigen::MatrixXd m(rows, cols);
    take(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
};

}  // namespace

std::string serialize_summary(const NeighborSummary& s) {
  std::string out;
  put_bytes(out, kMagic, 4);
  put_pod<std::uint32_t>(out, kVersion);
  put_pod<std::int32_t>(out, s.region_id);
  put_matrix(out, s.prior_mean);
  put_matrix(out, s.prior_P);
  put_matrix(out, s.prior_sigma_points);
  put_matrix(out, s.chi);
  put_matrix(out, s.C);
  return out;
}

NeighborSummary deserialize_summary(const std::string& bytes) {
  Reader r{bytes};
  char magic[4];
  r.take(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error("summary: bad magic");
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw Error("summary: unsupported version " + std::to_string(version));
  }
  NeighborSummary s;
  s.region_id = r.pod<std::int32_t>();
  s.prior_mean = r.matrix();
  s.prior_P = r.matrix();
  s.prior_sigma_points = r.matrix();
  s.chi = r.matrix();
  s.C = r.matrix();
  if (r.pos != bytes.size()) throw Error("summary: trailing bytes");
  return s;
}

}  // namespace wasse
