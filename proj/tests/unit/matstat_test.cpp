#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "msv/errors.hpp"
#include "msv/matstat.hpp"
#include "test_support.hpp"

namespace msv {
namespace {

using testing::random_spd;
using testing::relative_frobenius;

Matrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v.asDiagonal();
}

TEST(SymPosDef, RejectsAsymmetricAndIndefinite) {
  Matrix asym(2, 2);
  asym << 2, 1, 0.5, 2;
  EXPECT_THROW(SymPosDef{asym}, DomainError);
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_THROW(SymPosDef{indefinite}, NotPositiveDefinite);
  EXPECT_THROW(SymPosDef{Matrix(2, 3)}, DimensionMismatch);
}

TEST(CholUpper, IdentityAndDiagonal) {
  EXPECT_TRUE(chol_upper(SymPosDef::identity(4)).upper().isApprox(Matrix::Identity(4, 4)));
  EXPECT_TRUE(chol_upper(SymPosDef(diag({4, 9}))).upper().isApprox(diag({2, 3})));
}

TEST(CholUpper, ReconstructsRandomSpd) {
  Rng rng(11);
  const Matrix A = random_spd(3, rng);
  const UpperCholesky U = chol_upper(SymPosDef(A));
  EXPECT_TRUE(U.upper().isUpperTriangular());
  EXPECT_LE(relative_frobenius(U.reconstruct(), A), 1e-12);
  for (Eigen::Index p = 1; p <= 16; ++p) {
    const Matrix B = random_spd(p, rng);
    const UpperCholesky V = chol_upper(SymPosDef(B));
    EXPECT_LE(relative_frobenius(V.reconstruct(), B), 1e-10) << "p=" << p;
    EXPECT_GT(V.upper().diagonal().minCoeff(), 0.0);
  }
}

TEST(CholUpper, NonPositivePivotThrows) {
  Matrix singular = Matrix::Ones(3, 3);
  EXPECT_THROW(chol_upper(singular), NotPositiveDefinite);
}

TEST(SymInvSqrt, KnownCasesAndReconstruction) {
  EXPECT_TRUE(sym_inv_sqrt(SymPosDef::identity(3)).matrix().isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(sym_inv_sqrt(SymPosDef(diag({4, 16}))).matrix().isApprox(diag({0.5, 0.25})));
  Rng rng(5);
  for (Eigen::Index p = 1; p <= 10; ++p) {
    const SymPosDef A(random_spd(p, rng));
    const Matrix B = sym_inv_sqrt(A).matrix();
    EXPECT_EQ((B - B.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(relative_frobenius(B * A.matrix() * B, Matrix::Identity(p, p)), 1e-10);
    const Matrix R = sym_sqrt(A).matrix();
    EXPECT_LE(relative_frobenius(R * R, A.matrix()), 1e-10);
  }
}

TEST(LogDet, KnownCasesAndEigenOracle) {
  EXPECT_DOUBLE_EQ(log_det(SymPosDef::identity(5)), 0.0);
  EXPECT_NEAR(log_det(SymPosDef(diag({2, 3}))), std::log(6.0), 1e-15);
  Rng rng(9);
  for (Eigen::Index p = 1; p <= 8; ++p) {
    const Matrix A = random_spd(p, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    const double oracle = es.eigenvalues().array().log().sum();
    EXPECT_NEAR(log_det(SymPosDef(A)), oracle, 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(LogMultigamma, ClosedFormsAndHighPrecisionOracle) {
  EXPECT_NEAR(log_multigamma(1, 3.0), std::log(2.0), 1e-14);
  const double expected = 0.5 * std::log(std::numbers::pi) + std::lgamma(1.5) + std::lgamma(1.0);
  EXPECT_NEAR(log_multigamma(2, 1.5), expected, 1e-14);

  using testing::HighPrecision;
  HighPrecision oracle = HighPrecision(3 * 2) / 4 * log(testing::hp_pi());
  for (int j = 1; j <= 3; ++j) oracle += testing::hp_lgamma(HighPrecision(5) - HighPrecision(j - 1) / 2);
  EXPECT_NEAR(log_multigamma(3, 5.0), static_cast<double>(oracle), 1e-12);

  for (double a : {0.6, 1.0, 2.5, 10.0}) EXPECT_NEAR(log_multigamma(1, a), std::lgamma(a), 1e-15);
}

TEST(LogMultigamma, DomainError) {
  EXPECT_THROW(log_multigamma(3, 1.0), DomainError);
  EXPECT_THROW(log_multigamma(2, 0.5), DomainError);
  EXPECT_THROW(log_multigamma(0, 2.0), DomainError);
}

TEST(StudentT, ValuesAtOrigin) {
  EXPECT_NEAR(student_t_logpdf(Vector::Zero(1), 1.0), -std::log(std::numbers::pi), 1e-14);
  for (int p : {1, 2, 5}) {
    for (double n : {0.5, 3.0, 19.0}) {
      const double expected = std::lgamma((n + p) / 2) - std::lgamma(n / 2) -
                              0.5 * p * std::log(std::numbers::pi);
      EXPECT_NEAR(student_t_logpdf(Vector::Zero(p), n), expected, 1e-13);
    }
  }
}

TEST(StudentT, HighPrecisionOracle) {
  using testing::HighPrecision;
  const HighPrecision n = 19, p = 2, uu = 2;
  const HighPrecision oracle = testing::hp_lgamma((n + p) / 2) - testing::hp_lgamma(n / 2) -
                               p / 2 * log(testing::hp_pi()) - (n + p) / 2 * log(1 + uu);
  EXPECT_NEAR(student_t_logpdf(Vector::Ones(2), 19.0), static_cast<double>(oracle), 1e-13);
  EXPECT_THROW(student_t_logpdf(Vector::Ones(2), 0.0), DomainError);
}

TEST(StudentT, UnivariateDensityIntegratesToOne) {
  // Substitution x = tan θ maps the real line onto (-π/2, π/2).
  const int nodes = 200000;
  const double h = std::numbers::pi / nodes;
  Vector u(1);
  for (double n : {2.0, 7.0 / 3.0, 4.0, 19.0}) {
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double theta = -0.5 * std::numbers::pi + (i + 0.5) * h;
      u[0] = std::tan(theta);
      const double c = std::cos(theta);
      sum += std::exp(student_t_logpdf(u, n)) / (c * c);
    }
    EXPECT_NEAR(sum * h, 1.0, 1e-4) << "n=" << n;
  }
}

TEST(PositiveEigenvalues, BasicCases) {
  EXPECT_TRUE(positive_eigenvalues(Matrix::Zero(3, 3)).empty());
  Vector v(3);
  v << 1, -2, 0.5;
  const auto values = positive_eigenvalues(v * v.transpose());
  ASSERT_EQ(values.size(), 1u);
  EXPECT_NEAR(values[0], v.squaredNorm(), 1e-12);
}

TEST(PositiveEigenvalues, RankOfProjection) {
  Rng rng(21);
  const Eigen::Index p = 6;
  Eigen::HouseholderQR<Matrix> qr(random_spd(p, rng));
  const Matrix Q = qr.householderQ();
  for (Eigen::Index r = 0; r <= p; ++r) {
    const Matrix P = Q.leftCols(r) * Q.leftCols(r).transpose();
    EXPECT_EQ(positive_eigenvalues(P).size(), static_cast<std::size_t>(r));
  }
}

TEST(PositiveEigenvalues, DescendingOrderAndSymmetrization) {
  Matrix m(3, 3);
  m << 1, 0, 0, 1e-14, 3, 0, 0, 0, -2;
  const auto values = positive_eigenvalues(m);
  ASSERT_EQ(values.size(), 2u);
  EXPECT_GT(values[0], values[1]);
}

TEST(Wishart, MeanMatchesDfTimesScale) {
  Rng rng(101);
  const int draws = 200000;
  Matrix sum = Matrix::Zero(2, 2);
  const SymPosDef scale = SymPosDef::identity(2);
  for (int i = 0; i < draws; ++i) sum += wishart_sample(5.0, scale, rng).matrix();
  const Matrix mean = sum / draws;
  EXPECT_NEAR(mean(0, 0), 5.0, 0.1);
  EXPECT_NEAR(mean(1, 1), 5.0, 0.1);
  EXPECT_NEAR(mean(0, 1), 0.0, 0.1);
}

TEST(Wishart, DiagonalVarianceIdentity) {
  Rng rng(202);
  const int draws = 100000;
  const SymPosDef scale(diag({1, 4}));
  double s1 = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double w = wishart_sample(3.0, scale, rng).matrix()(0, 0);
    s1 += w;
    s2 += w * w;
  }
  const double mean = s1 / draws;
  const double var = s2 / draws - mean * mean;
  EXPECT_NEAR(var, 2.0 * 3.0, 0.05 * 6.0);
}

TEST(Wishart, DrawsArePositiveDefiniteAndDfChecked) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const SymPosDef w = wishart_sample(3.2, SymPosDef::identity(3), rng);
    EXPECT_GT(symmetric_eigen(w.matrix()).values.minCoeff(), 0.0);
  }
  EXPECT_THROW(wishart_sample(2.0, SymPosDef::identity(3), rng), DomainError);
}

TEST(FactorKernels, RankOneUpdateMatchesRefactorization) {
  Rng rng(8);
  const Matrix S = random_spd(5, rng);
  Matrix L = Eigen::LLT<Matrix>(S).matrixL();
  Vector x(5);
  for (int i = 0; i < 5; ++i) x[i] = standard_normal(rng);
  cholesky_rank1_update(L, x);
  const Matrix expected = Eigen::LLT<Matrix>(S + x * x.transpose()).matrixL();
  EXPECT_LE(relative_frobenius(L, expected), 1e-13);
}

TEST(FactorKernels, UpperRootAndPolarWhitening) {
  Rng rng(13);
  for (Eigen::Index p = 1; p <= 8; ++p) {
    const SymPosDef S(random_spd(p, rng));
    const Matrix L = Eigen::LLT<Matrix>(S.matrix()).matrixL();
    const Matrix R = upper_root_from_lower(L);
    EXPECT_TRUE(R.isUpperTriangular(1e-14));
    EXPECT_GT(R.diagonal().minCoeff(), 0.0);
    EXPECT_LE(relative_frobenius(R * R.transpose(), S.matrix()), 1e-12);
    // R⁻¹ is chol_upper(S⁻¹).
    const Matrix U = chol_upper(inverse(S)).upper();
    EXPECT_LE(relative_frobenius(R.inverse(), U), 1e-10);

    Vector y(p);
    for (Eigen::Index i = 0; i < p; ++i) y[i] = standard_normal(rng);
    const Vector via_polar = polar_orthogonal(L) * L.triangularView<Eigen::Lower>().solve(y);
    const Vector via_eigen = sym_inv_sqrt(S).matrix() * y;
    EXPECT_LE((via_polar - via_eigen).norm(), 1e-10 * via_eigen.norm());
  }
}

}  // namespace
}  // namespace msv
