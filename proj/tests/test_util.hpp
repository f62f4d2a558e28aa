#pragma once

#include "lrb/random.hpp"
#include "lrb/subspace.hpp"

#include <vector>

namespace lrb::testing {

inline Matrix randn(Eigen::Index m, Eigen::Index n, std::uint64_t seed)
{
  Rng rng(seed);
  return gaussianMatrix(m, n, rng);
}

/// Exact rank-r matrix with Gaussian factors.
inline Matrix randomRank(Eigen::Index m, Eigen::Index n, Eigen::Index r, std::uint64_t seed)
{
  Rng rng(seed);
  const Matrix A = gaussianMatrix(m, r, rng);
  const Matrix B = gaussianMatrix(n, r, rng);
  return A * B.transpose();
}

inline Matrix unitE(Eigen::Index m, Eigen::Index n, Eigen::Index i, Eigen::Index j)
{
  Matrix E = Matrix::Zero(m, n);
  E(i, j) = 1.0;
  return E;
}

/// Rank from singular values with a relative cutoff.
inline Eigen::Index numericalRank(const Matrix& X, double rel = 1e-10)
{
  const Vector s = Eigen::JacobiSVD<Matrix>(X).singularValues();
  if (s(0) == 0.0)
    return 0;
  return (s.array() > rel * s(0)).count();
}

} // namespace lrb::testing
