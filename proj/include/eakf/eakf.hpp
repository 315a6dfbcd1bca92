#pragma once

#include <cstdint>

#include "eakf/ensemble.hpp"
#include "eakf/linalg.hpp"

/**
 * Ensemble Adjustment Kalman Filter analysis step.
 *
 * Perturbations are updated as Z^a = A Z^f with
 *
 *     A = Z^f C (I + Gamma)^{-1/2} G^+ F^T,
 *
 * where Z^f = F G U^T is the SVD with G of size r x m (r = rank Z^f),
 * G^+ its pseudoinverse, and V R^-1 V^T = C Gamma C^T with V = (H Z^f)^T.
 *
 * Substituting gives Z^a = Z^f C (I + Gamma)^{-1/2} (G^+ G) U^T, and G^+ G is
 * the projector diag(1, ..., 1, 0, ..., 0) with r ones. It therefore discards
 * the trailing m - r columns of Z^f C. That is harmless only when those columns
 * are already zero, i.e. when the trailing columns of C span null(Z^f); then
 * Z^a Z^aT = Z^f (I + V R^-1 V^T)^-1 Z^fT, the exact Kalman posterior.
 * OrderingMode::misordered deliberately breaks that contract.
 *
 * The textbook variant with G^-1 in place of G^+ assumes an invertible
 * square G, which would need rank Z^f = m. Since the perturbations are centred,
 * rank Z^f <= min(n, m - 1) < m, so that form has no valid evaluation and is
 * not provided.
 */
namespace eakf {

struct ObsSpaceProjection {
  Matrix V;  // m x p, (H Z)^T
  Matrix S;  // m x m, V R^-1 V^T
};

struct OrderingMode {
  enum class Kind { correct, misordered };
  Kind kind = Kind::correct;
  std::uint64_t seed = 0;

  static OrderingMode correct() { return {}; }
  static OrderingMode misordered(std::uint64_t seed) { return {Kind::misordered, seed}; }
  bool is_correct() const { return kind == Kind::correct; }
};

struct AdjustmentMatrix {
  Matrix A;  // n x n
  linalg::SvdFactors svd;
  linalg::OrderedEigen eig;
};

struct AnalysisResult {
  Vector mean_a;
  Matrix Za;
  Matrix Pa;
  Matrix gain;
};

ObsSpaceProjection project_observations(const PerturbationMatrix& z, const ObservationModel& obs);

/// K = P^f H^T (H P^f H^T + R)^-1 through a Cholesky solve.
Matrix kalman_gain(const PerturbationMatrix& z, const ObservationModel& obs);

/// A from already-computed factors. No ordering checks: callers that pass a
/// misordered C get the misordered update.
Matrix adjustment_from_factors(const Matrix& z, const linalg::SvdFactors& svd,
                               const linalg::OrderedEigen& eig);

/// Permutes C's columns (and Gamma) so that at least one null-space column
/// leaves the trailing block. No-op when r == 0 or r == m.
void misorder_columns(linalg::OrderedEigen& eig, Index rank, std::uint64_t seed);

AdjustmentMatrix adjustment_matrix(const PerturbationMatrix& z, const ObservationModel& obs,
                                   OrderingMode mode = OrderingMode::correct());

/// Full analysis step: perturbations via A, mean via the Kalman gain.
AnalysisResult analyze(const ForecastEnsemble& ens, const ObservationModel& obs,
                       OrderingMode mode = OrderingMode::correct());

}  // namespace eakf
