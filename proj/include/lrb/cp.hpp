#pragma once

#include "lrb/greedy.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lrb {

/// Third-order m x n x d tensor held as its d slices M_k (each m x n).
struct Tensor3 {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<Matrix> slices;

  Tensor3() = default;
  explicit Tensor3(std::vector<Matrix> slices);
  Eigen::Index d() const { return static_cast<Eigen::Index>(slices.size()); }

  static Tensor3 fromSubspace(const MatrixSubspace& sub);
};

/// M_k = sum_l C(k, l) A.col(l) B.col(l)^T.
struct CpFactors {
  Matrix A;  ///< m x d
  Matrix B;  ///< n x d
  Matrix C;  ///< d x d
};

class CpError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A normal-equation system in the ALS update is singular; block() is "A", "B" or "C".
class CpRankDeficientError : public CpError {
public:
  CpRankDeficientError(const std::string& what, std::string block) : CpError(what), block_(std::move(block)) {}
  const std::string& block() const { return block_; }

private:
  std::string block_;
};

/// mn x d matrix whose k-th column is vec(M_k).
Matrix matricize(const Tensor3& T);

/// Slices rebuilt from factors.
Tensor3 reconstruct(const CpFactors& F);

/// ||T - [[A, B, C]]||_F / ||T||_F (absolute when T is zero).
double cpRelativeResidual(const Tensor3& T, const CpFactors& F);

/// 0.5 ||T - [[A, B, C]]||_F^2.
double cpObjective(const Tensor3& T, const CpFactors& F);

/// Columns of A and B scaled to unit norm, scale moved into C.
CpFactors normalizeFactors(const CpFactors& F);

/// Simultaneous diagonalization of random combinations of the slices after
/// compressing to d x d. Requires d <= min(m, n) (std::invalid_argument otherwise);
/// throws CpError("non-generic instance ...") when three random combinations all give
/// complex or clustered eigenvalues, and CpError when the reconstruction misses 1e-8.
CpFactors leurgansDecompose(const Tensor3& T, Rng& rng);

/// Alternating least squares, each block solved exactly through its Gram system.
/// objectives, when given, receives the objective after every sweep.
CpFactors alsRefine(const Tensor3& T, const CpFactors& init, std::size_t sweeps,
                    std::vector<double>* objectives = nullptr);

/// Gaussian factors of the right shape.
CpFactors randomFactors(Eigen::Index m, Eigen::Index n, Eigen::Index d, Rng& rng);

struct CpReport {
  bool usedAls = false;
  std::string leurgansFailure;  ///< empty when Leurgans succeeded
  double residual = 0.0;        ///< relative CP residual of the accepted factors
};

/// Rank-one basis a_l b_l^T from a CP decomposition of the basis tensor:
/// Leurgans first, 500 ALS sweeps from a random start when it fails.
/// Throws CpError when neither path reaches relative residual 1e-8.
BasisResult rankOneBasisViaCp(const MatrixSubspace& sub, std::uint64_t seed = 0, CpReport* report = nullptr);

/// Greedy column matching by largest |cosine|; returns perm with
/// estimate column perm[j] matched to reference column j.
std::vector<Eigen::Index> matchColumns(const Matrix& reference, const Matrix& estimate);

} // namespace lrb
