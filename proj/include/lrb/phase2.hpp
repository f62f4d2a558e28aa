#pragma once

#include "lrb/phase1.hpp"

#include <optional>
#include <vector>

namespace lrb {

struct Phase2Config {
  Eigen::Index r = 1;
  double tol = 1e-14;
  std::size_t maxit = 1000;
  std::size_t restartit = 50;
  double restarttol = 1e-3;

  /// Checks r against min(m, n) as well when both are given.
  void validate(Eigen::Index m = 0, Eigen::Index n = 0) const;
};

struct Phase2Result {
  Matrix X;  ///< in the subspace, unit Frobenius norm
  Matrix Y;  ///< T_r(X)
  double residual = 0.0;  ///< ||X - Y||_F
  bool converged = false;
  std::size_t iterations = 0;  ///< SVDs taken; 1 means X0 already had rank r
  std::size_t restarts = 0;
  std::vector<double> truncationErrors;    ///< ||X_k - T_r(X_k)||_F per SVD
  std::vector<double> convergenceFactors;  ///< consecutive ratios of truncationErrors
  IterationTrace trace;
};

/// Alternating projections between rank-r matrices and the unit sphere of the subspace:
/// Y = T_r(X), X = P(Y) / ||P(Y)||_F, until ||X - T_r(X)||_F <= tol or maxit SVDs.
/// Non-convergence is reported through the result, not thrown.
Phase2Result refineToRank(const MatrixSubspace& sub, const Matrix& X0, const Phase2Config& cfg,
                          const std::optional<Projector>& restartProj, Rng& rng, const TraceContext& ctx = {});

/// Angle between the tangent space of the rank-r manifold at Xstar and the tangent
/// space of the unit sphere of the subspace at Xstar (both taken orthogonal to Xstar).
/// pi/2 when the subspace is one-dimensional, 0 when the two intersect nontrivially.
double tangentAngle(const Matrix& Xstar, const MatrixSubspace& sub, Eigen::Index r);

/// Samples 32 random elements of span(complementBasis) and checks that their column
/// and row spaces meet those of Xstar only trivially (smallest principal angle > 1e-8).
bool lemma2Check(const Matrix& Xstar, const std::vector<Matrix>& complementBasis);

} // namespace lrb
