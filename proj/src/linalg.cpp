#include "eakf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace eakf::linalg {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(std::string(what) + ": non-finite entry");
  }
}

double relative_frobenius(const Matrix& a, const Matrix& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

void normalize_column_sign(Matrix& m, Index j, Matrix* partner) {
  if (m.rows() == 0) return;
  // Magnitudes within kTieTol of the maximum count as ties so that entries
  // equal up to rounding (e.g. +-1/sqrt(2)) resolve to the smallest index.
  constexpr double kTieTol = 1e-12;
  const double top = m.col(j).cwiseAbs().maxCoeff();
  Index arg = 0;
  while (std::abs(m(arg, j)) < top * (1.0 - kTieTol)) ++arg;
  if (m(arg, j) < 0.0) {
    m.col(j) = -m.col(j);
    if (partner != nullptr) {
      partner->col(j) = -partner->col(j);
    }
  }
}

SvdFactors svd_full(const Matrix& m, double rank_tol) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw Error("svd_full: empty matrix");
  }
  require_finite(m, "svd_full");

  const Index n = m.rows();
  const Index cols = m.cols();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();

  const double threshold =
      rank_tol * (sigma.size() > 0 ? sigma(0) : 0.0) * static_cast<double>(std::max(n, cols));
  Index r = 0;
  while (r < sigma.size() && sigma(r) > threshold) {
    ++r;
  }

  SvdFactors out;
  out.rank = r;
  out.F = svd.matrixU().leftCols(r);
  out.U = svd.matrixV();
  out.G = Matrix::Zero(r, cols);
  for (Index i = 0; i < r; ++i) {
    out.G(i, i) = sigma(i);
  }

  for (Index j = 0; j < r; ++j) {
    normalize_column_sign(out.F, j, &out.U);
  }
  for (Index j = r; j < cols; ++j) {
    normalize_column_sign(out.U, j);
  }
  return out;
}

Matrix pinv_rect_diag(const Matrix& g) {
  const Index r = g.rows();
  const Index m = g.cols();
  if (r > m) {
    throw Error("pinv_rect_diag: expected r <= m, got " + std::to_string(r) + "x" +
                std::to_string(m));
  }
  require_finite(g, "pinv_rect_diag");
  Matrix out = Matrix::Zero(m, r);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i != j && g(i, j) != 0.0) {
        throw Error("pinv_rect_diag: matrix is not rectangular diagonal");
      }
    }
    if (!(g(i, i) > 0.0)) {
      throw Error("pinv_rect_diag: zero diagonal entry at " + std::to_string(i) +
                  " (truncate to numerical rank first)");
    }
    out(i, i) = 1.0 / g(i, i);
  }
  return out;
}

OrderedEigen ordered_eig_psd(const Matrix& s, const Matrix& row_space_basis,
                             const Matrix& null_basis, const EigOptions& opts) {
  const Index m = s.rows();
  const Index r = row_space_basis.cols();
  if (s.cols() != m || row_space_basis.rows() != m || null_basis.rows() != m ||
      r + null_basis.cols() != m) {
    throw Error("ordered_eig_psd: shape mismatch (S " + std::to_string(m) + "x" +
                std::to_string(s.cols()) + ", row basis " + std::to_string(row_space_basis.rows()) +
                "x" + std::to_string(r) + ", null basis " + std::to_string(null_basis.rows()) + "x" +
                std::to_string(null_basis.cols()) + ")");
  }
  require_finite(s, "ordered_eig_psd");

  const double s_norm = s.norm();
  if ((s - s.transpose()).norm() > opts.symmetry_tol * s_norm) {
    throw Error("ordered_eig_psd: S is not symmetric");
  }
  if (null_basis.cols() > 0 && (s * null_basis).norm() > opts.null_tol * s_norm) {
    throw Error("ordered_eig_psd: basis inconsistent with S");
  }

  OrderedEigen out;
  out.C = Matrix::Zero(m, m);
  out.gamma = Vector::Zero(m);
  out.C.rightCols(m - r) = null_basis;

  if (r > 0) {
    const Matrix sym = 0.5 * (s + s.transpose());
    Matrix w = row_space_basis.transpose() * sym * row_space_basis;
    w = (0.5 * (w + w.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(w);
    if (es.info() != Eigen::Success) {
      throw Error("ordered_eig_psd: eigensolver did not converge");
    }

    std::vector<Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector& lambda = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return lambda(a) > lambda(b); });

    Matrix q(r, r);
    for (Index k = 0; k < r; ++k) {
      const Index src = order[static_cast<std::size_t>(k)];
      q.col(k) = es.eigenvectors().col(src);
      out.gamma(k) = std::max(lambda(src), 0.0);
    }
    out.C.leftCols(r) = row_space_basis * q;
    for (Index k = 0; k < r; ++k) {
      normalize_column_sign(out.C, k);
    }
  }

  const double top = m > 0 ? out.gamma(0) : 0.0;
  const double threshold = opts.rank_tol * top * static_cast<double>(m);
  out.effective_rank = 0;
  while (out.effective_rank < m && out.gamma(out.effective_rank) > threshold) {
    ++out.effective_rank;
  }
  return out;
}

}  // namespace eakf::linalg
