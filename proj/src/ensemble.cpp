#include "eakf/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eakf {

namespace {

std::string shape(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_ensemble_size(Index m) {
  if (m < 2) {
    throw Error("ensemble too small: need at least 2 members, got " + std::to_string(m));
  }
}

}  // namespace

ForecastEnsemble::ForecastEnsemble(Matrix members) : members_(std::move(members)) {
  require_ensemble_size(members_.cols());
  linalg::require_finite(members_, "ensemble members");
  mean_ = members_.rowwise().mean();
}

ForecastEnsemble::ForecastEnsemble(Matrix members, Vector mean)
    : members_(std::move(members)), mean_(std::move(mean)) {
  require_ensemble_size(members_.cols());
  linalg::require_finite(members_, "ensemble members");
  if (mean_.size() != members_.rows()) {
    throw Error("ensemble mean has length " + std::to_string(mean_.size()) + ", expected " +
                std::to_string(members_.rows()));
  }
  const double scale = std::max(members_.cwiseAbs().maxCoeff(), 1.0);
  const Vector avg = members_.rowwise().mean();
  if ((avg - mean_).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw Error("ensemble mean does not match the member average");
  }
}

ObservationModel::ObservationModel(Matrix h, Matrix r, Vector y)
    : h_(std::move(h)), r_(std::move(r)), y_(std::move(y)) {
  const Index p = h_.rows();
  if (r_.rows() != p || r_.cols() != p) {
    throw Error("R has shape " + shape(r_.rows(), r_.cols()) + ", expected " + shape(p, p));
  }
  if (y_.size() != p) {
    throw Error("y has length " + std::to_string(y_.size()) + ", expected " + std::to_string(p));
  }
  linalg::require_finite(h_, "H");
  linalg::require_finite(r_, "R");
  linalg::require_finite(y_, "y");
  if ((r_ - r_.transpose()).norm() > 1e-12 * r_.norm()) {
    throw Error("R not symmetric");
  }
  r_llt_.compute(r_);
  if (r_llt_.info() != Eigen::Success) {
    throw Error("R not positive definite");
  }
}

ObservationModel ObservationModel::with_diagonal_r(Matrix h, const Vector& variances, Vector y) {
  return ObservationModel(std::move(h), variances.asDiagonal(), std::move(y));
}

PerturbationMatrix perturbation_matrix(const ForecastEnsemble& ens) {
  const Index m = ens.size();
  require_ensemble_size(m);
  PerturbationMatrix out;
  out.scale_members = m;
  out.Z = (ens.members().colwise() - ens.mean()) / std::sqrt(static_cast<double>(m - 1));
  return out;
}

Matrix forecast_cov(const PerturbationMatrix& z) {
  const Matrix p = z.Z * z.Z.transpose();
  return 0.5 * (p + p.transpose());
}

ForecastEnsemble reconstruct_members(const Vector& mean, const Matrix& za, double centering_tol) {
  const Index m = za.cols();
  require_ensemble_size(m);
  if (mean.size() != za.rows()) {
    throw Error("analysis mean has length " + std::to_string(mean.size()) + ", expected " +
                std::to_string(za.rows()));
  }
  linalg::require_finite(za, "analysis perturbations");
  if (za.rowwise().sum().norm() > centering_tol * za.norm()) {
    throw Error("perturbations not centered");
  }
  Matrix members = (std::sqrt(static_cast<double>(m - 1)) * za).colwise() + mean;
  return ForecastEnsemble(std::move(members));
}

}  // namespace eakf
