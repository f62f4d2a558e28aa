#include "lrb/subspace.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lrb;
using lrb::testing::randn;
using lrb::testing::unitE;

namespace {

std::vector<Matrix> randomMats(std::size_t d, Eigen::Index m, Eigen::Index n, std::uint64_t seed)
{
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < d; ++i)
    out.push_back(randn(m, n, seed * 1000 + i));
  return out;
}

std::vector<Matrix> recombine(const std::vector<Matrix>& mats, const Matrix& G)
{
  std::vector<Matrix> out;
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    Matrix X = Matrix::Zero(mats[0].rows(), mats[0].cols());
    for (std::size_t i = 0; i < mats.size(); ++i)
      X += G(static_cast<Eigen::Index>(i), j) * mats[i];
    out.push_back(X);
  }
  return out;
}

} // namespace

TEST(BuildSubspace, DiagonalPair)
{
  const MatrixSubspace sub = buildSubspace({unitE(2, 2, 0, 0), unitE(2, 2, 1, 1)});
  EXPECT_EQ(sub.dim(), 2);
  const Matrix D = Eigen::Vector2d(2.5, -1.0).asDiagonal();
  EXPECT_LE((project(Projector::full(sub), D) - D).norm(), 1e-15);
}

TEST(BuildSubspace, SingleMatrix)
{
  const Matrix M = randn(3, 4, 1);
  const MatrixSubspace sub = buildSubspace({M});
  const Vector expected = kernels::vec(M) / M.norm();
  EXPECT_LE((sub.basis().col(0).cwiseAbs() - expected.cwiseAbs()).norm(), 1e-15);
}

TEST(BuildSubspace, ReproducesSpanningSet)
{
  const auto mats = randomMats(5, 20, 10, 2);
  const MatrixSubspace sub = buildSubspace(mats);
  EXPECT_LE((sub.basis().transpose() * sub.basis() - Matrix::Identity(5, 5)).norm(), 1e-12);
  const Projector P = Projector::full(sub);
  for (const auto& M : mats)
    EXPECT_LE((project(P, M) - M).norm(), 1e-12 * M.norm());
}

TEST(BuildSubspace, DependentSetNamesRank)
{
  auto mats = randomMats(4, 3, 3, 3);
  mats[3] = mats[0] - 2.0 * mats[1];
  try {
    buildSubspace(mats);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.numericalRank(), 3);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
}

TEST(Project, InsideAndOrthogonal)
{
  const MatrixSubspace sub = buildSubspace({unitE(3, 3, 0, 0), unitE(3, 3, 1, 2)});
  const Projector P = Projector::full(sub);
  const Matrix inside = 2.0 * unitE(3, 3, 0, 0) - unitE(3, 3, 1, 2);
  EXPECT_LE((project(P, inside) - inside).norm(), 1e-15);
  EXPECT_EQ(project(P, unitE(3, 3, 2, 2)).norm(), 0.0);
  EXPECT_THROW(project(P, Matrix::Ones(2, 3)), std::invalid_argument);
}

TEST(ProjectProperty, PythagorasIdempotenceNonExpansive)
{
  const MatrixSubspace sub = buildSubspace(randomMats(4, 6, 5, 4));
  const Projector P = Projector::full(sub);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix Y = randn(6, 5, seed);
    const Matrix PY = project(P, Y);
    EXPECT_NEAR(Y.squaredNorm(), PY.squaredNorm() + (Y - PY).squaredNorm(), 1e-12 * Y.squaredNorm());
    EXPECT_LE((project(P, PY) - PY).norm(), 1e-12 * Y.norm());
    EXPECT_LE(PY.norm(), Y.norm() * (1.0 + 1e-15));
  }
}

TEST(ComplementProjector, EmptyChosenIsFull)
{
  const MatrixSubspace sub = buildSubspace(randomMats(3, 4, 4, 5));
  const Projector Q = complementProjector(sub, {});
  EXPECT_EQ(Q.dim(), 3);
  EXPECT_EQ(Q.kind(), ProjectorKind::Complement);
  const Matrix Y = randn(4, 4, 9);
  EXPECT_LE((project(Q, Y) - project(Projector::full(sub), Y)).norm(), 1e-12);
}

TEST(ComplementProjector, FullChosenIsZero)
{
  const auto mats = randomMats(3, 4, 4, 6);
  const MatrixSubspace sub = buildSubspace(mats);
  const Projector Q = complementProjector(sub, mats);
  EXPECT_EQ(Q.dim(), 0);
  EXPECT_EQ(project(Q, randn(4, 4, 1)).norm(), 0.0);
}

TEST(ComplementProjector, RankAndAnnihilation)
{
  const MatrixSubspace sub = buildSubspace(randomMats(5, 6, 6, 7));
  Rng rng(3);
  const Projector full = Projector::full(sub);
  const std::vector<Matrix> chosen{randomElement(full, rng), randomElement(full, rng)};
  const Projector Q = complementProjector(sub, chosen);
  EXPECT_EQ(Q.dim(), 3);
  EXPECT_LE((Q.columns().transpose() * Q.columns() - Matrix::Identity(3, 3)).norm(), 1e-12);
  for (const auto& X : chosen)
    EXPECT_LE(project(Q, X).norm(), 1e-12);
}

TEST(ComplementProjector, Rejections)
{
  const auto mats = randomMats(3, 4, 4, 8);
  const MatrixSubspace sub = buildSubspace(mats);
  EXPECT_THROW(complementProjector(sub, {randn(4, 4, 99)}), std::invalid_argument);
  EXPECT_THROW(complementProjector(sub, {mats[0], 2.0 * mats[0]}), std::exception);
}

TEST(ProjectorProperty, PartialPlusComplement)
{
  const MatrixSubspace sub = buildSubspace(randomMats(5, 5, 4, 9));
  Rng rng(4);
  const Projector full = Projector::full(sub);
  for (int l = 1; l <= 4; ++l) {
    std::vector<Matrix> chosen;
    for (int i = 0; i < l; ++i)
      chosen.push_back(randomElement(full, rng));
    const Projector P = partialProjector(sub, chosen);
    const Projector Q = complementProjector(sub, chosen);
    EXPECT_EQ(P.kind(), ProjectorKind::Partial);
    EXPECT_LE((P.columns().transpose() * Q.columns()).norm(), 1e-12);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrix Y = randn(5, 4, seed);
      EXPECT_LE((project(full, Y) - project(P, Y) - project(Q, Y)).norm(), 1e-12);
    }
  }
}

TEST(RandomElement, OneDimensional)
{
  const Matrix M = randn(3, 3, 10);
  const MatrixSubspace sub = buildSubspace({M});
  Rng rng(5);
  const Matrix X = randomElement(Projector::full(sub), rng);
  EXPECT_NEAR(std::abs(X.cwiseProduct(M).sum()) / M.norm(), 1.0, 1e-14);
}

TEST(RandomElement, NormalizedAndInside)
{
  const MatrixSubspace sub = buildSubspace(randomMats(4, 5, 5, 11));
  const Projector P = Projector::full(sub);
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Matrix X = randomElement(P, rng);
    EXPECT_NEAR(X.norm(), 1.0, 1e-14);
    EXPECT_LE((project(P, X) - X).norm(), 1e-13);
  }
}

TEST(RandomElement, Deterministic)
{
  const MatrixSubspace sub = buildSubspace(randomMats(4, 5, 5, 12));
  const Projector P = Projector::full(sub);
  Rng a(42), b(42);
  EXPECT_EQ(randomElement(P, a), randomElement(P, b));
}

TEST(RandomElement, ZeroDimensionalRejected)
{
  const auto mats = randomMats(2, 3, 3, 13);
  const MatrixSubspace sub = buildSubspace(mats);
  Rng rng(1);
  EXPECT_THROW(randomElement(complementProjector(sub, mats), rng), std::invalid_argument);
}

TEST(SubspaceAngle, KnownAngles)
{
  const Matrix e1 = unitE(2, 1, 0, 0);
  const Matrix e2 = unitE(2, 1, 1, 0);
  const MatrixSubspace A = buildSubspace({e1});
  EXPECT_NEAR(subspaceAngle(A, A), 0.0, 1e-15);
  EXPECT_NEAR(subspaceAngle(A, buildSubspace({e2})), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(subspaceAngle(A, buildSubspace({e1 + e2})), std::numbers::pi / 4, 1e-15);
  EXPECT_THROW(subspaceAngle(A, buildSubspace({Matrix::Ones(3, 1)})), std::invalid_argument);
}

TEST(SubspaceProperty, BasisInvariance)
{
  const auto mats = randomMats(5, 6, 6, 14);
  const MatrixSubspace s1 = buildSubspace(recombine(mats, randn(5, 5, 1)));
  const MatrixSubspace s2 = buildSubspace(recombine(mats, randn(5, 5, 2)));
  EXPECT_LE(subspaceAngle(s1, s2), 1e-10);
}
