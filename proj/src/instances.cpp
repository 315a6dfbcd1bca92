#include "eakf/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace eakf::harness {

namespace {

constexpr double kMaxConditionR = 1e4;

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Matrix normal_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      out(i, j) = normal(rng);
    }
  }
  return out;
}

Matrix random_r(Rng& rng, Index p) {
  std::uniform_real_distribution<double> var(0.1, 2.0);
  Vector d(p);
  for (Index i = 0; i < p; ++i) d(i) = var(rng);
  if (std::bernoulli_distribution(0.5)(rng)) {
    return d.asDiagonal();
  }
  const Matrix l = normal_matrix(rng, p, p) / std::sqrt(static_cast<double>(p));
  Matrix r = Matrix(d.asDiagonal()) + l * l.transpose();
  r = (0.5 * (r + r.transpose())).eval();
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(r, Eigen::EigenvaluesOnly).eigenvalues();
  const double lo = eig.minCoeff();
  const double hi = eig.maxCoeff();
  if (hi > kMaxConditionR * lo) {
    // Shift so that (hi + s) / (lo + s) == kMaxConditionR.
    const double shift = (hi - kMaxConditionR * lo) / (kMaxConditionR - 1.0);
    r += shift * Matrix::Identity(p, p);
  }
  return r;
}

Instance assemble(InstanceKind kind, Matrix members, Matrix h, Rng& rng) {
  ForecastEnsemble ens(std::move(members));
  const Index p = h.rows();
  Matrix r = random_r(rng, p);
  const Vector y = h * ens.mean() + normal_matrix(rng, p, 1);
  return Instance{std::move(ens), ObservationModel(std::move(h), std::move(r), y), kind};
}

Instance generic(const InstanceRanges& ranges, Rng& rng) {
  const int n = uniform_int(rng, ranges.n.lo, ranges.n.hi);
  const int m = uniform_int(rng, ranges.m.lo, ranges.m.hi);
  const int p_hi = std::min(ranges.p.hi, n);
  const int p = uniform_int(rng, std::min(ranges.p.lo, p_hi), p_hi);
  Matrix members = normal_matrix(rng, n, m);
  Matrix h = normal_matrix(rng, p, n);
  return assemble(InstanceKind::generic, std::move(members), std::move(h), rng);
}

}  // namespace

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::generic: return "generic";
    case InstanceKind::rank_deficient: return "rank_deficient";
    case InstanceKind::partial_obs: return "partial_obs";
    case InstanceKind::zero_h: return "zero_h";
    case InstanceKind::zero_ensemble: return "zero_ensemble";
  }
  return "unknown";
}

Instance make_instance(InstanceKind kind, const InstanceRanges& ranges, Rng& rng) {
  switch (kind) {
    case InstanceKind::generic:
      return generic(ranges, rng);

    case InstanceKind::rank_deficient: {
      // Need m - 1 < n, i.e. m <= n.
      const int m_hi = std::min(ranges.m.hi, ranges.n.hi);
      if (ranges.m.lo > m_hi) return generic(ranges, rng);
      const int m = uniform_int(rng, ranges.m.lo, m_hi);
      const int n = uniform_int(rng, std::max(ranges.n.lo, m), ranges.n.hi);
      const int p_hi = std::min(ranges.p.hi, n);
      const int p = uniform_int(rng, std::min(ranges.p.lo, p_hi), p_hi);
      Matrix members = normal_matrix(rng, n, m);
      Matrix h = normal_matrix(rng, p, n);
      return assemble(kind, std::move(members), std::move(h), rng);
    }

    case InstanceKind::partial_obs: {
      // Need p < rank Z^f = min(n, m - 1), so min(n, m - 1) >= 2.
      const int m_lo = std::max(ranges.m.lo, 3);
      const int n_lo = std::max(ranges.n.lo, 2);
      if (m_lo > ranges.m.hi || n_lo > ranges.n.hi) return generic(ranges, rng);
      const int m = uniform_int(rng, m_lo, ranges.m.hi);
      const int n = uniform_int(rng, n_lo, ranges.n.hi);
      const int p_hi = std::min({ranges.p.hi, n, m - 1}) - 1;
      if (p_hi < 1) return generic(ranges, rng);
      const int p = uniform_int(rng, std::clamp(ranges.p.lo, 1, p_hi), p_hi);

      std::vector<Index> coords(static_cast<std::size_t>(n));
      std::iota(coords.begin(), coords.end(), Index{0});
      std::shuffle(coords.begin(), coords.end(), rng);
      Matrix h = Matrix::Zero(p, n);
      for (int i = 0; i < p; ++i) h(i, coords[static_cast<std::size_t>(i)]) = 1.0;
      Matrix members = normal_matrix(rng, n, m);
      return assemble(kind, std::move(members), std::move(h), rng);
    }

    case InstanceKind::zero_h: {
      const int n = uniform_int(rng, ranges.n.lo, ranges.n.hi);
      const int m = uniform_int(rng, ranges.m.lo, ranges.m.hi);
      const int p_hi = std::min(ranges.p.hi, n);
      const int p = uniform_int(rng, std::min(ranges.p.lo, p_hi), p_hi);
      Matrix members = normal_matrix(rng, n, m);
      return assemble(kind, std::move(members), Matrix::Zero(p, n), rng);
    }

    case InstanceKind::zero_ensemble: {
      const int n = uniform_int(rng, ranges.n.lo, ranges.n.hi);
      const int m = uniform_int(rng, ranges.m.lo, ranges.m.hi);
      const int p_hi = std::min(ranges.p.hi, n);
      const int p = uniform_int(rng, std::min(ranges.p.lo, p_hi), p_hi);
      // Small integers keep the member average exact, so Z^f is exactly zero.
      Vector state(n);
      for (Index i = 0; i < n; ++i) state(i) = static_cast<double>(uniform_int(rng, -5, 5));
      Matrix members = state.replicate(1, m);
      Matrix h = normal_matrix(rng, p, n);
      return assemble(kind, std::move(members), std::move(h), rng);
    }
  }
  return generic(ranges, rng);
}

Instance scalar_instance() {
  Matrix members(1, 2);
  members << 1.0, -1.0;
  return Instance{ForecastEnsemble(std::move(members)),
                  ObservationModel(Matrix::Ones(1, 1), Matrix::Constant(1, 1, 2.0), Vector::Ones(1)),
                  InstanceKind::generic};
}

}  // namespace eakf::harness
