#include "eakf/oracle.hpp"

#include <algorithm>
#include <string>

namespace eakf::oracle {

namespace {

Matrix symmetrized(const Matrix& p) { return 0.5 * (p + p.transpose()); }

void check_state_dim(Index n, const ObservationModel& obs) {
  if (obs.state_dim() != n) {
    throw Error("oracle: H has " + std::to_string(obs.state_dim()) +
                " columns, state dimension is " + std::to_string(n));
  }
}

Eigen::LLT<Matrix> spd_factor(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(std::string("oracle: ") + what + " not positive definite");
  }
  return llt;
}

/// K = P^f H^T (H P^f H^T + R)^-1.
Matrix gain(const Matrix& pf, const ObservationModel& obs) {
  const Matrix pht = pf * obs.H().transpose();
  const Matrix innovation = obs.H() * pht + obs.R();
  const auto llt = spd_factor(symmetrized(innovation), "innovation covariance");
  return llt.solve(pht.transpose()).transpose();
}

}  // namespace

Matrix posterior_cov_direct(const Matrix& pf, const ObservationModel& obs) {
  const Index n = pf.rows();
  if (pf.cols() != n) {
    throw Error("oracle: P^f is not square");
  }
  check_state_dim(n, obs);
  const Matrix k = gain(pf, obs);
  return symmetrized((Matrix::Identity(n, n) - k * obs.H()) * pf);
}

Matrix posterior_cov_reduced(const PerturbationMatrix& z, const ObservationModel& obs) {
  check_state_dim(z.state_dim(), obs);
  const Index m = z.size();
  const Matrix v = (obs.H() * z.Z).transpose();
  const auto llt = spd_factor(v.transpose() * v + obs.R(), "V^T V + R");
  const Matrix inner = Matrix::Identity(m, m) - v * llt.solve(v.transpose());
  return symmetrized(z.Z * inner * z.Z.transpose());
}

Matrix posterior_cov_woodbury(const PerturbationMatrix& z, const ObservationModel& obs) {
  check_state_dim(z.state_dim(), obs);
  const Index m = z.size();
  const Matrix v = (obs.H() * z.Z).transpose();
  const auto r_llt = spd_factor(obs.R(), "R");
  const Matrix core = Matrix::Identity(m, m) + v * r_llt.solve(v.transpose());
  const auto llt = spd_factor(symmetrized(core), "I + V R^-1 V^T");
  return symmetrized(z.Z * llt.solve(z.Z.transpose()));
}

Vector posterior_mean_direct(const Vector& mean_f, const Matrix& pf, const ObservationModel& obs) {
  check_state_dim(mean_f.size(), obs);
  return mean_f + gain(pf, obs) * (obs.y() - obs.H() * mean_f);
}

ComparisonReport compare_cov(const Matrix& lhs, const Matrix& rhs, double tolerance) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw Error("compare_cov: shape mismatch " + std::to_string(lhs.rows()) + "x" +
                std::to_string(lhs.cols()) + " vs " + std::to_string(rhs.rows()) + "x" +
                std::to_string(rhs.cols()));
  }
  ComparisonReport rep;
  const Matrix diff = lhs - rhs;
  rep.frobenius_abs = diff.norm();
  rep.frobenius_rel = rep.frobenius_abs / std::max(rhs.norm(), kNormFloor);
  rep.trace_lhs = lhs.trace();
  rep.trace_rhs = rhs.trace();
  rep.trace_deficit = rep.trace_rhs - rep.trace_lhs;
  rep.max_abs_entry_diff = diff.size() > 0 ? diff.cwiseAbs().maxCoeff() : 0.0;
  rep.tolerance = tolerance;
  rep.passed = rep.frobenius_rel <= tolerance;
  return rep;
}

}  // namespace eakf::oracle
