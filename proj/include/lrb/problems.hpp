#pragma once

#include "lrb/subspace.hpp"

#include <cstdint>
#include <vector>

namespace lrb {

struct SyntheticSpec {
  Eigen::Index m = 20;
  Eigen::Index n = 20;
  std::vector<Eigen::Index> ranks;
  std::uint64_t seed = 0;
  /// Hand the solver a random invertible recombination of the ground-truth basis.
  bool mix = true;
};

struct GroundTruth {
  std::vector<Matrix> basis;
  std::vector<Eigen::Index> ranks;
};

struct Instance {
  MatrixSubspace sub;
  GroundTruth truth;
  std::uint64_t seedUsed = 0;  ///< differs from the requested seed after a regeneration
};

/// M_l = U_l V_l^T with U_l, V_l the thin Q factors of Gaussian m x r_l and n x r_l
/// matrices. A numerically dependent draw is regenerated with seed + 1 (3 attempts).
Instance generateSynthetic(const SyntheticSpec& spec);

/// Three 7 x 7 diagonal matrices whose span contains a rank-5 matrix of smaller
/// normalized nuclear norm than the rank-3 spanning matrices.
struct Counterexample {
  std::vector<Matrix> M;  ///< M_1, M_2, M_3
  Matrix X;               ///< M_1 + sqrt(eps) (M_2 + M_3) = diag(1, 0, 0, eps, eps, eps, eps)
  double epsilon = 0.0;
  MatrixSubspace sub;

  /// (1 + 2 sqrt(eps)) / sqrt(1 + 2 eps)
  double predictedSpanningRatio() const;
  /// (1 + 4 eps) / sqrt(1 + 4 eps^2)
  double predictedXRatio() const;
};

Counterexample counterexampleSubspace(double epsilon);

/// ||X||_* / ||X||_F.
double normalizedNuclearNorm(const Matrix& X);

/// Orthonormal real DFT basis of R^N: column 0 constant, columns 2k-1 and 2k
/// the cosine and sine of frequency k (and the alternating Nyquist column for even N).
Matrix realDftBasis(Eigen::Index N);

/// Frequency of real DFT column j.
Eigen::Index realDftFrequency(Eigen::Index j);

struct CirculantInstance {
  MatrixSubspace sub;
  GroundTruth truth;              ///< matricized real DFT columns (nSide x nSide)
  std::vector<double> eigenvalues;  ///< clustered eigenvalues 1 + eps_i of the cluster
  std::vector<Eigen::Index> frequencies;  ///< frequency of each ground-truth element
  Eigen::Index nSide = 0;
};

/// Eigenvectors of a circulant matrix of size nSide^2 for a cluster of clusterSize
/// eigenvalues: a Haar-random orthogonal mixing of the first clusterSize real DFT
/// columns, each matricized to nSide x nSide.
CirculantInstance circulantEigenproblem(Eigen::Index nSide, Eigen::Index clusterSize, double clusterSpread,
                                        std::uint64_t seed);

/// Entries needed for d basis elements of rank at most rhat in factored form
/// (two nSide-vectors per rank-one term) plus the d x d coefficients, against d
/// dense nSide^2 vectors.
struct StorageCount {
  Eigen::Index factored = 0;
  Eigen::Index dense = 0;
};
StorageCount circulantStorage(Eigen::Index nSide, Eigen::Index d, Eigen::Index rhat);

struct CompressionRatios {
  double classic = 0.0;  ///< (m + n) r / (mn)
  double nested = 0.0;   ///< (4 s r rhat + r^2) / (mn), s = sqrt(m)
};

/// Throws std::invalid_argument when m is not a perfect square.
CompressionRatios compressionRatio(Eigen::Index m, Eigen::Index n, Eigen::Index r, Eigen::Index rhat);

/// Asymptotic storage fractions with r = delta n, rhat = deltaHat s:
/// nested 4 delta deltaHat + delta^2, classic 2 delta.
double asymptoticNestedRatio(double delta, double deltaHat);
double asymptoticClassicRatio(double delta);

} // namespace lrb
