#include "eakf/eakf.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace eakf {

namespace {

void check_shapes(const PerturbationMatrix& z, const ObservationModel& obs) {
  if (obs.state_dim() != z.state_dim()) {
    throw Error("H has " + std::to_string(obs.state_dim()) + " columns, state dimension is " +
                std::to_string(z.state_dim()));
  }
}

}  // namespace

ObsSpaceProjection project_observations(const PerturbationMatrix& z, const ObservationModel& obs) {
  check_shapes(z, obs);
  ObsSpaceProjection out;
  out.V = (obs.H() * z.Z).transpose();
  const Matrix s = out.V * obs.solve_r(out.V.transpose());
  out.S = 0.5 * (s + s.transpose());
  return out;
}

Matrix kalman_gain(const PerturbationMatrix& z, const ObservationModel& obs) {
  check_shapes(z, obs);
  const Matrix hz = obs.H() * z.Z;
  const Matrix h_pf = hz * z.Z.transpose();  // H P^f, p x n
  const Matrix innovation = hz * hz.transpose() + obs.R();
  Eigen::LLT<Matrix> llt(innovation);
  if (llt.info() != Eigen::Success) {
    throw Error("kalman_gain: innovation covariance not positive definite");
  }
  // The innovation covariance is symmetric, so K^T = (H P^f H^T + R)^-1 H P^f.
  return llt.solve(h_pf).transpose();
}

Matrix adjustment_from_factors(const Matrix& z, const linalg::SvdFactors& svd,
                               const linalg::OrderedEigen& eig) {
  const Index n = z.rows();
  if (svd.rank == 0) {
    return Matrix::Zero(n, n);
  }
  const Vector scale = (Vector::Ones(eig.gamma.size()) + eig.gamma.cwiseMax(0.0)).cwiseSqrt().cwiseInverse();
  const Matrix g_pinv = linalg::pinv_rect_diag(svd.G);
  return (z * eig.C) * scale.asDiagonal() * g_pinv * svd.F.transpose();
}

void misorder_columns(linalg::OrderedEigen& eig, Index rank, std::uint64_t seed) {
  const Index m = eig.C.cols();
  if (rank <= 0 || rank >= m) {
    return;
  }
  // Plain Fisher-Yates on raw engine output: std::shuffle and the standard
  // distributions are implementation-defined, and the misordered update has
  // to be reproducible from its seed on every platform.
  std::mt19937_64 rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(m));
  auto displaces_null_column = [&] {
    for (Index k = 0; k < rank; ++k) {
      if (perm[static_cast<std::size_t>(k)] >= rank) {
        return true;
      }
    }
    return false;
  };
  do {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(perm[i], perm[j]);
    }
  } while (!displaces_null_column());

  linalg::Matrix c(eig.C.rows(), m);
  linalg::Vector gamma(m);
  for (Index k = 0; k < m; ++k) {
    c.col(k) = eig.C.col(perm[static_cast<std::size_t>(k)]);
    gamma(k) = eig.gamma(perm[static_cast<std::size_t>(k)]);
  }
  eig.C = std::move(c);
  eig.gamma = std::move(gamma);
}

AdjustmentMatrix adjustment_matrix(const PerturbationMatrix& z, const ObservationModel& obs,
                                   OrderingMode mode) {
  if (z.size() < 2) {
    throw Error("ensemble too small: need at least 2 members, got " + std::to_string(z.size()));
  }
  AdjustmentMatrix out;
  out.svd = linalg::svd_full(z.Z);
  const ObsSpaceProjection proj = project_observations(z, obs);
  out.eig = linalg::ordered_eig_psd(proj.S, out.svd.row_space_basis(), out.svd.null_basis());
  if (!mode.is_correct()) {
    misorder_columns(out.eig, out.svd.rank, mode.seed);
  }
  out.A = adjustment_from_factors(z.Z, out.svd, out.eig);
  return out;
}

AnalysisResult analyze(const ForecastEnsemble& ens, const ObservationModel& obs, OrderingMode mode) {
  const PerturbationMatrix z = perturbation_matrix(ens);
  const AdjustmentMatrix adj = adjustment_matrix(z, obs, mode);

  AnalysisResult out;
  out.Za = adj.A * z.Z;
  const Matrix pa = out.Za * out.Za.transpose();
  out.Pa = 0.5 * (pa + pa.transpose());
  out.gain = kalman_gain(z, obs);
  out.mean_a = ens.mean() + out.gain * (obs.y() - obs.H() * ens.mean());
  return out;
}

}  // namespace eakf
