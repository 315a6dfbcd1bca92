#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "eakf/linalg.hpp"
#include "test_support.hpp"

using namespace eakf::linalg;
using eakf::testing::normal_matrix;
using eakf::testing::uniform_int;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Matrix row(std::initializer_list<double> values) {
  Matrix m(1, static_cast<Index>(values.size()));
  Index j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

void check_svd_invariants(const Matrix& m, const SvdFactors& f) {
  const Index n = m.rows(), cols = m.cols(), r = f.rank;
  REQUIRE(f.F.rows() == n);
  REQUIRE(f.F.cols() == r);
  REQUIRE(f.G.rows() == r);
  REQUIRE(f.G.cols() == cols);
  REQUIRE(f.U.rows() == cols);
  REQUIRE(f.U.cols() == cols);
  CHECK(r <= std::min(n, cols));
  CHECK((f.F.transpose() * f.F - Matrix::Identity(r, r)).norm() <= 1e-12);
  CHECK((f.U.transpose() * f.U - Matrix::Identity(cols, cols)).norm() <= 1e-12);
  CHECK((f.U * f.U.transpose() - Matrix::Identity(cols, cols)).norm() <= 1e-12);
  CHECK((f.F * f.G * f.U.transpose() - m).norm() <= 1e-12 * std::max(m.norm(), 1e-300));
  for (Index i = 0; i < r; ++i) {
    CHECK(f.G(i, i) > 0.0);
    if (i > 0) CHECK(f.G(i, i) <= f.G(i - 1, i - 1));
  }
}

}  // namespace

TEST_CASE("svd_full: identity") {
  const SvdFactors f = svd_full(Matrix::Identity(2, 2));
  CHECK(f.rank == 2);
  CHECK(f.F.isApprox(Matrix::Identity(2, 2)));
  CHECK(f.G.isApprox(Matrix::Identity(2, 2)));
  CHECK(f.U.isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("svd_full: single row [1, -1]") {
  const Matrix m = row({1.0, -1.0});
  const SvdFactors f = svd_full(m);
  check_svd_invariants(m, f);
  CHECK(f.rank == 1);
  CHECK(f.F(0, 0) == doctest::Approx(1.0));
  CHECK(f.G(0, 0) == doctest::Approx(kSqrt2));
  CHECK(f.G(0, 1) == 0.0);
  // Row-space vector carries the sign of F; the null vector has its first
  // (tied) largest entry positive.
  CHECK(f.U(0, 0) == doctest::Approx(1.0 / kSqrt2));
  CHECK(f.U(1, 0) == doctest::Approx(-1.0 / kSqrt2));
  CHECK(f.U(0, 1) == doctest::Approx(1.0 / kSqrt2));
  CHECK(f.U(1, 1) == doctest::Approx(1.0 / kSqrt2));
}

TEST_CASE("svd_full: zero matrix has rank 0") {
  const Matrix m = Matrix::Zero(2, 3);
  const SvdFactors f = svd_full(m);
  CHECK(f.rank == 0);
  CHECK(f.F.cols() == 0);
  CHECK(f.G.rows() == 0);
  CHECK(f.G.cols() == 3);
  CHECK((f.U.transpose() * f.U - Matrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK(f.null_basis().cols() == 3);
}

TEST_CASE("svd_full: errors") {
  CHECK_THROWS_WITH_AS(svd_full(Matrix(0, 3)), doctest::Contains("empty matrix"), eakf::Error);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd_full(bad), eakf::Error);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(svd_full(bad), eakf::Error);
}

TEST_CASE("svd_full: random matrices satisfy the factor contracts") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = uniform_int(rng, 1, 15);
    const int m = uniform_int(rng, 2, 12);
    Matrix a = normal_matrix(rng, n, m);
    if (trial % 3 == 0) {
      // Centered columns: rank <= m - 1.
      a = eakf::testing::centered_perturbations(a);
    }
    const SvdFactors f = svd_full(a);
    check_svd_invariants(a, f);
    if (trial % 3 == 0) CHECK(f.rank <= m - 1);
    const int full_rank = trial % 3 == 0 ? std::min(n, m - 1) : std::min(n, m);
    CHECK(f.rank == full_rank);

    // Sign convention on the left singular vectors.
    for (Index j = 0; j < f.rank; ++j) {
      const double top = f.F.col(j).cwiseAbs().maxCoeff();
      Index arg = 0;
      while (std::abs(f.F(arg, j)) < top * (1.0 - 1e-12)) ++arg;
      CHECK(f.F(arg, j) > 0.0);
    }
  }
}

TEST_CASE("svd_full: rank threshold is relative to sigma_1 * max(n, m)") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-17;  // below eps * 1 * 3
  a(2, 2) = 1e-10;
  const SvdFactors f = svd_full(a);
  CHECK(f.rank == 2);
  CHECK(svd_full(a, 1e-8).rank == 1);
}

TEST_CASE("svd_full: deterministic") {
  std::mt19937_64 rng(7);
  const Matrix a = eakf::testing::centered_perturbations(normal_matrix(rng, 9, 6));
  const SvdFactors f1 = svd_full(a);
  const SvdFactors f2 = svd_full(a);
  CHECK(f1.F == f2.F);
  CHECK(f1.G == f2.G);
  CHECK(f1.U == f2.U);
}

TEST_CASE("pinv_rect_diag: examples") {
  const Matrix g1 = row({kSqrt2, 0.0});
  const Matrix p1 = pinv_rect_diag(g1);
  REQUIRE(p1.rows() == 2);
  REQUIRE(p1.cols() == 1);
  CHECK(p1(0, 0) == doctest::Approx(1.0 / kSqrt2));
  CHECK(p1(1, 0) == 0.0);

  Matrix g2 = Matrix::Zero(2, 2);
  g2(0, 0) = 2.0;
  g2(1, 1) = 1.0;
  const Matrix p2 = pinv_rect_diag(g2);
  CHECK(p2(0, 0) == 0.5);
  CHECK(p2(1, 1) == 1.0);
  CHECK(p2(0, 1) == 0.0);
  CHECK(p2(1, 0) == 0.0);

  CHECK(pinv_rect_diag(Matrix::Constant(1, 1, 4.0))(0, 0) == 0.25);
}

TEST_CASE("pinv_rect_diag: errors") {
  CHECK_THROWS_WITH_AS(pinv_rect_diag(row({0.0, 0.0})), doctest::Contains("zero diagonal"),
                       eakf::Error);
  Matrix off = Matrix::Zero(1, 2);
  off(0, 0) = 1.0;
  off(0, 1) = 0.5;
  CHECK_THROWS_AS(pinv_rect_diag(off), eakf::Error);
}

TEST_CASE("pinv_rect_diag: Moore-Penrose identities and the G+G projector") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sigma(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = uniform_int(rng, 1, 12);
    const int r = uniform_int(rng, 1, m);
    Matrix g = Matrix::Zero(r, m);
    for (int i = 0; i < r; ++i) g(i, i) = sigma(rng);
    const Matrix gp = pinv_rect_diag(g);
    CHECK((gp * g * gp - gp).norm() <= 1e-15 * gp.norm());
    CHECK((g * gp * g - g).norm() <= 1e-15 * g.norm());

    const Matrix proj = gp * g;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double expected = (i == j && i < r) ? 1.0 : 0.0;
        CHECK(proj(i, j) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("ordered_eig_psd: single-observation scalar case") {
  const Matrix z = row({1.0, -1.0});
  Matrix s(2, 2);
  s << 0.5, -0.5, -0.5, 0.5;
  const SvdFactors f = svd_full(z);
  const OrderedEigen e = ordered_eig_psd(s, f.row_space_basis(), f.null_basis());
  CHECK(e.gamma(0) == doctest::Approx(1.0));
  CHECK(e.gamma(1) == 0.0);
  CHECK(e.effective_rank == 1);
  CHECK(std::abs(e.C(0, 0)) == doctest::Approx(1.0 / kSqrt2));
  CHECK(e.C(0, 0) == doctest::Approx(-e.C(1, 0)));
  CHECK(e.C(0, 1) == doctest::Approx(1.0 / kSqrt2));
  CHECK(e.C(1, 1) == doctest::Approx(1.0 / kSqrt2));

  const Matrix zc = z * e.C;
  CHECK(std::abs(zc(0, 0)) == doctest::Approx(kSqrt2));
  CHECK(std::abs(zc(0, 1)) <= 1e-15);
  CHECK((e.C * e.gamma.asDiagonal() * e.C.transpose() - s).norm() <= 1e-14);
}

TEST_CASE("ordered_eig_psd: zero S keeps the null basis verbatim") {
  std::mt19937_64 rng(3);
  for (int m = 2; m <= 6; ++m) {
    const Matrix z = eakf::testing::centered_perturbations(normal_matrix(rng, 3, m));
    const SvdFactors f = svd_full(z);
    const OrderedEigen e = ordered_eig_psd(Matrix::Zero(m, m), f.row_space_basis(), f.null_basis());
    CHECK(e.gamma.isZero(0.0));
    CHECK(e.effective_rank == 0);
    CHECK(e.C.rightCols(m - f.rank) == f.null_basis());
  }
}

TEST_CASE("ordered_eig_psd: null(S) larger than null(Z) still puts null(Z) last") {
  Matrix z(2, 3);
  z << 1.0, -1.0, 0.0, 0.0, 1.0, -1.0;
  z /= kSqrt2;
  Matrix s(3, 3);
  s << 1.0, -1.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0;
  s *= 0.5;

  const SvdFactors f = svd_full(z);
  REQUIRE(f.rank == 2);
  const OrderedEigen e = ordered_eig_psd(s, f.row_space_basis(), f.null_basis());
  CHECK(e.gamma(0) == doctest::Approx(1.0));
  CHECK(std::abs(e.gamma(1)) <= 1e-15);
  CHECK(e.gamma(2) == 0.0);
  CHECK((e.C * e.gamma.asDiagonal() * e.C.transpose() - s).norm() <= 1e-14);
  CHECK((z * e.C.col(2)).norm() <= 1e-15);
  const double third = 1.0 / std::sqrt(3.0);
  for (Index i = 0; i < 3; ++i) CHECK(e.C(i, 2) == doctest::Approx(third));
}

TEST_CASE("ordered_eig_psd: errors") {
  const Matrix z = row({1.0, -1.0});
  const SvdFactors f = svd_full(z);
  Matrix asym(2, 2);
  asym << 0.5, -0.4, -0.5, 0.5;
  CHECK_THROWS_WITH_AS(ordered_eig_psd(asym, f.row_space_basis(), f.null_basis()),
                       doctest::Contains("not symmetric"), eakf::Error);
  // S = all-ones does not annihilate (1, 1).
  CHECK_THROWS_WITH_AS(ordered_eig_psd(Matrix::Ones(2, 2), f.row_space_basis(), f.null_basis()),
                       doctest::Contains("basis inconsistent with S"), eakf::Error);
  CHECK_THROWS_AS(ordered_eig_psd(Matrix::Zero(3, 3), f.row_space_basis(), f.null_basis()),
                  eakf::Error);
}

TEST_CASE("ordered_eig_psd: random Z^T H^T R^-1 H Z") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = uniform_int(rng, 1, 20);
    const int m = uniform_int(rng, 2, 12);
    const int p = uniform_int(rng, 1, n);
    const Matrix z = eakf::testing::centered_perturbations(normal_matrix(rng, n, m));
    Matrix h = normal_matrix(rng, p, n);
    if (trial % 4 == 1) h.setZero();
    const Matrix r = eakf::testing::random_spd(rng, p);
    const Matrix hz = h * z;
    Matrix s = hz.transpose() * r.llt().solve(hz);
    s = (0.5 * (s + s.transpose())).eval();

    const SvdFactors f = svd_full(z);
    const OrderedEigen e = ordered_eig_psd(s, f.row_space_basis(), f.null_basis());
    CHECK((e.C * e.gamma.asDiagonal() * e.C.transpose() - s).norm() <=
          1e-10 * std::max(s.norm(), 1e-300));
    CHECK((z * e.C.rightCols(m - f.rank)).norm() <= 1e-10 * z.norm());
    CHECK((e.C.transpose() * e.C - Matrix::Identity(m, m)).norm() <= 1e-12);
    for (Index i = 0; i < m; ++i) {
      CHECK(e.gamma(i) >= 0.0);
      if (i > 0) CHECK(e.gamma(i) <= e.gamma(i - 1));
    }

    const OrderedEigen again = ordered_eig_psd(s, f.row_space_basis(), f.null_basis());
    CHECK(again.C == e.C);
    CHECK(again.gamma == e.gamma);
  }
}
