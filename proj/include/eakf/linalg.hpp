#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <string_view>

#include "eakf/error.hpp"

/**
 * Dense decomposition primitives used by the EAKF update.
 *
 * The adjustment-matrix construction is only consistent with the Kalman
 * posterior if the decompositions honour specific shape and ordering
 * contracts:
 *
 *   - svd_full returns the "thin-left / full-right" SVD Z = F G U^T with
 *     F (n x r), G (r x m) rectangular diagonal and U (m x m) orthogonal, where
 *     r is the numerical rank. G is generally not square, so only its
 *     Moore-Penrose pseudoinverse (pinv_rect_diag) is defined.
 *
 *   - ordered_eig_psd decomposes S = V R^-1 V^T = C diag(Gamma) C^T such that
 *     the trailing m - r columns of C span null(Z). A generic symmetric
 *     eigensolver does not guarantee this: when H is not injective on
 *     range(Z), null(S) is strictly larger than null(Z) and sorting by
 *     eigenvalue alone cannot tell the two kinds of zero eigenvector apart.
 */
namespace eakf::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

/// Throws eakf::Error naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

/// Relative Frobenius distance ||a - b|| / max(||b||, floor).
double relative_frobenius(const Matrix& a, const Matrix& b, double floor = 1e-300);

/// Flip the sign of column `j` of `m` (and of `partner`, if given) so that the
/// entry of largest magnitude is positive; ties (to 1e-12 relative) go to the
/// smallest row index.
void normalize_column_sign(Matrix& m, Index j, Matrix* partner = nullptr);

struct SvdFactors {
  Matrix F;       // n x r, orthonormal columns
  Matrix G;       // r x m, rectangular diagonal, sigma_1 >= ... >= sigma_r > 0
  Matrix U;       // m x m, orthogonal; leading r columns span the row space
  Index rank = 0;

  Vector singular_values() const { return G.diagonal(); }
  /// Leading r columns of U.
  Matrix row_space_basis() const { return U.leftCols(rank); }
  /// Trailing m - r columns of U: an orthonormal basis of null(M).
  Matrix null_basis() const { return U.rightCols(U.cols() - rank); }
};

/// SVD with numerical rank r = #{ sigma_i > rank_tol * sigma_1 * max(n, m) }.
/// Left singular vectors have their largest-magnitude entry positive and the
/// matching right singular vectors carry the same sign; null-space columns of
/// U follow the same rule on their own entries.
SvdFactors svd_full(const Matrix& m, double rank_tol = kMachineEps);

/// Moore-Penrose pseudoinverse of an r x m rectangular diagonal matrix with a
/// strictly positive diagonal. Returns the m x r matrix with diagonal 1/sigma_i.
Matrix pinv_rect_diag(const Matrix& g);

struct OrderedEigen {
  Matrix C;       // m x m orthogonal
  Vector gamma;   // length m, descending, >= 0
  Index effective_rank = 0;
};

struct EigOptions {
  double symmetry_tol = 1e-10;  // on ||S - S^T|| / ||S||
  double null_tol = 1e-8;       // on ||S N|| / ||S||
  double rank_tol = kMachineEps;
};

/// Eigendecomposition of a symmetric PSD m x m matrix S whose range lies in
/// span(row_space_basis), with the columns of null_basis forced to be the
/// trailing columns of C (eigenvalue 0).
///
/// Construction: W = Ur^T S Ur is eigendecomposed as Q diag(lambda) Q^T with
/// lambda sorted descending (stable) and clamped at 0; then
/// C = [Ur Q, null_basis] and Gamma = (lambda, 0, ..., 0).
OrderedEigen ordered_eig_psd(const Matrix& s, const Matrix& row_space_basis,
                             const Matrix& null_basis, const EigOptions& opts = {});

}  // namespace eakf::linalg
