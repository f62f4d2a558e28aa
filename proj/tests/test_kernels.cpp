#include "lrb/kernels.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace lrb;
using lrb::testing::randn;

namespace {

double nuclear(const Matrix& X) { return Eigen::JacobiSVD<Matrix>(X).singularValues().sum(); }

} // namespace

TEST(Svd, DiagonalMatrix)
{
  Matrix X(2, 2);
  X << 3, 0, 0, 1;
  const SvdResult s = kernels::svd(X);
  EXPECT_NEAR(s.singularValues(0), 3.0, 1e-15);
  EXPECT_NEAR(s.singularValues(1), 1.0, 1e-15);
  EXPECT_NEAR((s.U.cwiseAbs() - Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((s.V.cwiseAbs() - Matrix::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(Svd, ZeroMatrix)
{
  const SvdResult s = kernels::svd(Matrix::Zero(2, 2));
  EXPECT_EQ(s.singularValues(0), 0.0);
  EXPECT_EQ(s.singularValues(1), 0.0);
}

TEST(Svd, ReconstructionAndOrthonormality)
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix X = randn(5, 3, seed);
    const SvdResult s = kernels::svd(X);
    EXPECT_LE((s.U * s.singularValues.asDiagonal() * s.V.transpose() - X).norm(), 1e-10 * X.norm());
    EXPECT_LE((s.U.transpose() * s.U - Matrix::Identity(3, 3)).norm(), 1e-12);
    EXPECT_LE((s.V.transpose() * s.V - Matrix::Identity(3, 3)).norm(), 1e-12);
    for (Eigen::Index i = 1; i < 3; ++i)
      EXPECT_GE(s.singularValues(i - 1), s.singularValues(i));
  }
}

TEST(Svd, SignConvention)
{
  const SvdResult s = kernels::svd(randn(6, 4, 3));
  for (Eigen::Index j = 0; j < s.U.cols(); ++j) {
    Eigen::Index imax = 0;
    s.U.col(j).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(s.U(imax, j), 0.0);
  }
}

TEST(Svd, RejectsNonFinite)
{
  Matrix X = Matrix::Ones(2, 2);
  X(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(kernels::svd(X), std::invalid_argument);
  X(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(kernels::svd(X), std::invalid_argument);
}

TEST(Svd, ExactZeroSingularValuesStayFinite)
{
  // Rank-deficient input of the kind produced by shrinkage.
  const Matrix X = lrb::testing::randomRank(20, 20, 3, 9);
  const SvdResult s = kernels::svd(X);
  EXPECT_TRUE(s.U.allFinite());
  EXPECT_TRUE(s.V.allFinite());
  EXPECT_LE((s.U * s.singularValues.asDiagonal() * s.V.transpose() - X).norm(), 1e-10 * X.norm());
}

TEST(Shrink, DiagonalCase)
{
  Matrix X(2, 2);
  X << 3, 0, 0, 1;
  Matrix expected(2, 2);
  expected << 2, 0, 0, 0;
  EXPECT_LE((kernels::shrink(X, 1.0) - expected).norm(), 1e-15);
}

TEST(Shrink, FullShrinkageGivesZero)
{
  const Matrix X = randn(4, 5, 2);
  const double s1 = kernels::svd(X).singularValues(0);
  EXPECT_EQ(kernels::shrink(X, s1).norm(), 0.0);
  EXPECT_EQ(kernels::shrink(X, 2.0 * s1).norm(), 0.0);
}

TEST(Shrink, DistanceFormula)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix X = randn(4, 4, seed);
    const Vector s = kernels::svd(X).singularValues;
    const double tau = s(1) + 1e-3 * (s(0) - s(1));
    const Matrix Y = kernels::shrink(X, tau);
    EXPECT_EQ(lrb::testing::numericalRank(Y, 1e-12), 1);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      expected += s(i) > tau ? tau * tau : s(i) * s(i);
    EXPECT_NEAR((X - Y).squaredNorm(), expected, 1e-12 * X.squaredNorm());
  }
}

TEST(Shrink, RejectsNonPositiveTau)
{
  EXPECT_THROW(kernels::shrink(Matrix::Ones(2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(kernels::shrink(Matrix::Ones(2, 2), -1.0), std::invalid_argument);
}

TEST(ShrinkProperty, NuclearNormDrop)
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix X = randn(6, 5, seed);
    const double tau = 0.3 * kernels::svd(X).singularValues(0);
    const SvdResult s = kernels::svd(X);
    const Matrix Y = kernels::shrink(s, tau);
    const Eigen::Index r = (s.singularValues.array() > tau).count();
    EXPECT_LE(nuclear(Y), nuclear(X) - tau * static_cast<double>(r) + 1e-12);
  }
}

TEST(ShrinkProperty, SolvesProximalProblem)
{
  Rng rng(77);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix X = randn(5, 4, seed);
    const double tau = 0.5;
    const Matrix Y = kernels::shrink(X, tau);
    const double fY = tau * nuclear(Y) + 0.5 * (Y - X).squaredNorm();
    for (int k = 0; k < 100; ++k) {
      const double scale = std::pow(10.0, -1.0 - (k % 6));
      const Matrix Yp = Y + scale * gaussianMatrix(5, 4, rng);
      const double fYp = tau * nuclear(Yp) + 0.5 * (Yp - X).squaredNorm();
      EXPECT_GE(fYp, fY - 1e-13);
    }
  }
}

TEST(ShrinkProperty, RatioGrowth)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Vector s = kernels::svd(randn(6, 6, seed)).singularValues;
    const double tau = 0.5 * s(3);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = i + 1; j < 4; ++j)
        if (s(i) > s(j))
          EXPECT_GT((s(i) - tau) / (s(j) - tau), s(i) / s(j));
  }
}

TEST(Truncate, FullRankIsIdentity)
{
  const Matrix X = randn(5, 3, 4);
  EXPECT_LE((kernels::truncate(X, 3) - X).norm(), 1e-12 * X.norm());
}

TEST(Truncate, DiagonalCase)
{
  const Matrix X = Eigen::Vector3d(3, 2, 1).asDiagonal();
  const Matrix expected = Eigen::Vector3d(3, 2, 0).asDiagonal();
  EXPECT_LE((kernels::truncate(X, 2) - expected).norm(), 1e-15);
}

TEST(Truncate, EckartYoung)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix X = randn(6, 4, seed);
    const Vector s = kernels::svd(X).singularValues;
    const Matrix T = kernels::truncate(X, 2);
    EXPECT_NEAR((X - T).squaredNorm(), s(2) * s(2) + s(3) * s(3), 1e-12 * X.squaredNorm());
    EXPECT_NEAR(kernels::truncationError(s, 2), std::hypot(s(2), s(3)), 1e-14);
    EXPECT_EQ(lrb::testing::numericalRank(T, 1e-12), 2);
  }
}

TEST(Truncate, RejectsRankOutOfRange)
{
  const Matrix X = randn(3, 4, 1);
  EXPECT_THROW(kernels::truncate(X, 0), std::invalid_argument);
  EXPECT_THROW(kernels::truncate(X, 4), std::invalid_argument);
}

TEST(TruncateProperty, Idempotent)
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix X = randn(7, 5, seed);
    for (Eigen::Index r = 1; r <= 5; ++r) {
      const Matrix T = kernels::truncate(X, r);
      EXPECT_LE((kernels::truncate(T, r) - T).norm(), 1e-12 * X.norm());
    }
  }
}

TEST(OrthonormalColumns, OrthonormalInputReturnedUpToSigns)
{
  const Matrix Q0 = Eigen::HouseholderQR<Matrix>(randn(8, 3, 5)).householderQ() * Matrix::Identity(8, 3);
  const Matrix Q = kernels::orthonormalColumns(Q0);
  EXPECT_LE((Q.cwiseAbs() - Q0.cwiseAbs()).norm(), 1e-12);
}

TEST(OrthonormalColumns, TwoColumnCase)
{
  Matrix A(3, 2);
  A << 1, 1, 0, 1, 0, 0;
  const Matrix Q = kernels::orthonormalColumns(A);
  EXPECT_LE((Q.transpose() * Q - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_NEAR(std::abs(Q(2, 0)) + std::abs(Q(2, 1)), 0.0, 1e-15);
  EXPECT_LE((Q * Q.transpose() * A - A).norm(), 1e-12);
}

TEST(OrthonormalColumns, SpanPreserved)
{
  const Matrix A = randn(20, 5, 6);
  const Matrix Q = kernels::orthonormalColumns(A);
  EXPECT_LE((Q.transpose() * Q - Matrix::Identity(5, 5)).norm(), 1e-12);
  for (Eigen::Index j = 0; j < 5; ++j)
    EXPECT_LE((Q * (Q.transpose() * A.col(j)) - A.col(j)).norm(), 1e-12 * A.col(j).norm());
}

TEST(OrthonormalColumns, RankDeficientReportsCount)
{
  Matrix A = randn(10, 4, 7);
  A.col(3) = A.col(0) + A.col(1);
  A.col(2) = 2.0 * A.col(0);
  try {
    kernels::orthonormalColumns(A);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.deficientColumns(), 2);
    EXPECT_EQ(e.numericalRank(), 2);
  }
}

TEST(PseudoInverse, Invertible)
{
  Matrix A = randn(3, 3, 8);
  A += 3.0 * Matrix::Identity(3, 3);
  EXPECT_LE((kernels::pseudoInverse(A) - A.inverse()).norm(), 1e-10 * A.inverse().norm());
}

TEST(PseudoInverse, ZeroMatrix)
{
  const Matrix P = kernels::pseudoInverse(Matrix::Zero(2, 3));
  EXPECT_EQ(P.rows(), 3);
  EXPECT_EQ(P.cols(), 2);
  EXPECT_EQ(P.norm(), 0.0);
}

TEST(PseudoInverse, PenroseConditions)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix A = lrb::testing::randomRank(4, 4, 2, seed);
    const Matrix P = kernels::pseudoInverse(A);
    EXPECT_LE((A * P * A - A).norm(), 1e-10 * A.norm());
    EXPECT_LE((P * A * P - P).norm(), 1e-10 * P.norm());
    EXPECT_LE((A * P - (A * P).transpose()).norm(), 1e-10);
    EXPECT_LE((P * A - (P * A).transpose()).norm(), 1e-10);
  }
}

TEST(Vec, ColumnStacking)
{
  Matrix M(2, 2);
  M << 1, 2, 3, 4;
  const Vector v = kernels::vec(M);
  EXPECT_EQ(v, Eigen::Vector4d(1, 3, 2, 4));
  EXPECT_EQ(kernels::mat(v, 2, 2), M);
  EXPECT_THROW(kernels::mat(v, 3, 2), std::invalid_argument);
}

TEST(KhatriRao, ColumnsAreKroneckerProducts)
{
  const Matrix A = randn(3, 2, 1);
  const Matrix B = randn(4, 2, 2);
  const Matrix K = kernels::khatriRao(B, A);
  for (Eigen::Index l = 0; l < 2; ++l) {
    const Matrix outer = A.col(l) * B.col(l).transpose();
    EXPECT_LE((K.col(l) - kernels::vec(outer)).norm(), 1e-15);
  }
  EXPECT_THROW(kernels::khatriRao(randn(4, 3, 1), A), std::invalid_argument);
}

TEST(PrincipalAngles, KnownCases)
{
  const Matrix e1 = Eigen::Vector2d(1, 0);
  const Matrix e2 = Eigen::Vector2d(0, 1);
  const Matrix d = Eigen::Vector2d(1, 1) / std::sqrt(2.0);
  EXPECT_NEAR(kernels::largestPrincipalSine(e1, e2), 1.0, 1e-15);
  EXPECT_NEAR(kernels::largestPrincipalSine(e1, d), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(kernels::smallestPrincipalSine(e1, e1), 0.0, 1e-15);
}
