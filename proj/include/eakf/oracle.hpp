#pragma once

#include "eakf/ensemble.hpp"

/// Reference Kalman-filter posterior covariances. Everything here uses plain
/// Cholesky solves and shares no decomposition code with the EAKF update.
namespace eakf::oracle {

/// (I - K H) P^f with K = P^f H^T (H P^f H^T + R)^-1.
Matrix posterior_cov_direct(const Matrix& pf, const ObservationModel& obs);

/// Z [I - V (V^T V + R)^-1 V^T] Z^T with V = (H Z)^T.
Matrix posterior_cov_reduced(const PerturbationMatrix& z, const ObservationModel& obs);

/// Z [I + V R^-1 V^T]^-1 Z^T.
Matrix posterior_cov_woodbury(const PerturbationMatrix& z, const ObservationModel& obs);

/// mu^f + K (y - H mu^f), K formed from `pf` independently of eakf::kalman_gain.
Vector posterior_mean_direct(const Vector& mean_f, const Matrix& pf, const ObservationModel& obs);

/// Guard for relative norms when the reference matrix is zero.
inline constexpr double kNormFloor = 1e-300;

struct ComparisonReport {
  double frobenius_abs = 0.0;
  double frobenius_rel = 0.0;
  double trace_lhs = 0.0;
  double trace_rhs = 0.0;
  double trace_deficit = 0.0;  // trace_rhs - trace_lhs; > 0 means lhs under-dispersed
  double max_abs_entry_diff = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

ComparisonReport compare_cov(const Matrix& lhs, const Matrix& rhs, double tolerance);

}  // namespace eakf::oracle
