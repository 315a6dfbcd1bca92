#pragma once

#include <optional>

#include "eakf/linalg.hpp"

namespace eakf {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

/// n x m ensemble, one member per column, with its mean cached at
/// construction.
class ForecastEnsemble {
 public:
  /// Mean computed as the row-wise average of `members`.
  explicit ForecastEnsemble(Matrix members);
  /// Mean supplied by the caller; must agree with the row-wise average to
  /// 1e-14 relative to the largest member magnitude.
  ForecastEnsemble(Matrix members, Vector mean);

  const Matrix& members() const { return members_; }
  const Vector& mean() const { return mean_; }
  Index state_dim() const { return members_.rows(); }
  Index size() const { return members_.cols(); }

 private:
  Matrix members_;
  Vector mean_;
};

/// Z^f = [x_1 - mu, ..., x_m - mu] / sqrt(m - 1).
struct PerturbationMatrix {
  Matrix Z;
  Index scale_members = 0;

  Index state_dim() const { return Z.rows(); }
  Index size() const { return Z.cols(); }
};

/// Linear observation y = H x + e, e ~ N(0, R), with p observations.
class ObservationModel {
 public:
  ObservationModel(Matrix h, Matrix r, Vector y);
  /// Diagonal R given as its variances.
  static ObservationModel with_diagonal_r(Matrix h, const Vector& variances, Vector y);

  const Matrix& H() const { return h_; }
  const Matrix& R() const { return r_; }
  const Vector& y() const { return y_; }
  Index obs_dim() const { return h_.rows(); }
  Index state_dim() const { return h_.cols(); }

  /// R^-1 b through the cached Cholesky factor.
  Matrix solve_r(const Matrix& b) const { return r_llt_.solve(b); }

 private:
  Matrix h_;
  Matrix r_;
  Vector y_;
  Eigen::LLT<Matrix> r_llt_;
};

PerturbationMatrix perturbation_matrix(const ForecastEnsemble& ens);

/// P^f = Z Z^T, symmetrized.
Matrix forecast_cov(const PerturbationMatrix& z);

/// Inverse of the perturbation scaling: member i = mean + sqrt(m - 1) Za(:, i).
/// Rows of Za must sum to zero within `centering_tol` * ||Za||.
ForecastEnsemble reconstruct_members(const Vector& mean, const Matrix& za,
                                     double centering_tol = 1e-12);

}  // namespace eakf
