#pragma once

#include "lrb/kernels.hpp"
#include "lrb/random.hpp"

#include <vector>

namespace lrb {

/// A d-dimensional subspace of m x n matrices, stored as an mn x d matrix
/// with orthonormal columns (the thin QR factor of the vectorized spanning set).
class MatrixSubspace {
public:
  MatrixSubspace(Eigen::Index m, Eigen::Index n, Matrix basisQ);

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  Eigen::Index dim() const { return basisQ_.cols(); }
  const Matrix& basis() const { return basisQ_; }

  /// The j-th orthonormal basis element as an m x n matrix.
  Matrix element(Eigen::Index j) const;

private:
  Eigen::Index m_;
  Eigen::Index n_;
  Matrix basisQ_;
};

enum class ProjectorKind { Full, Partial, Complement };

/// Orthogonal projector onto the span of an orthonormal column block.
/// Never materialized as an mn x mn matrix.
class Projector {
public:
  Projector(Eigen::Index m, Eigen::Index n, Matrix columns, ProjectorKind kind);

  static Projector full(const MatrixSubspace& sub);

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  Eigen::Index dim() const { return columns_.cols(); }
  ProjectorKind kind() const { return kind_; }
  const Matrix& columns() const { return columns_; }

  Matrix apply(const Matrix& Y) const;

private:
  Eigen::Index m_;
  Eigen::Index n_;
  Matrix columns_;
  ProjectorKind kind_;
};

/// Thin-QR the vectorized spanning matrices. Throws RankDeficientError when
/// sigma_min <= 1e-10 sigma_max of the stacked vectorizations.
MatrixSubspace buildSubspace(const std::vector<Matrix>& spanning);

/// P(Y) = mat(Q Q^T vec(Y)).
Matrix project(const Projector& P, const Matrix& Y);

/// Projector onto the orthogonal complement of span(chosen) inside the subspace.
/// Every chosen matrix must lie in the subspace to 1e-8 (relative), and the
/// set must be linearly independent.
Projector complementProjector(const MatrixSubspace& sub, const std::vector<Matrix>& chosen);

/// Projector onto span(chosen) (the partial projector P_l).
Projector partialProjector(const MatrixSubspace& sub, const std::vector<Matrix>& chosen);

/// Unit-Frobenius-norm element of range(P) with i.i.d. standard normal
/// coefficients over its orthonormal basis.
Matrix randomElement(const Projector& P, Rng& rng);

/// Largest principal angle in radians. With unequal dimensions, the angle of
/// the smaller subspace into the larger one.
double subspaceAngle(const MatrixSubspace& A, const MatrixSubspace& B);

/// Stacks vec(X_i) as columns.
Matrix stackVectorized(const std::vector<Matrix>& mats);

} // namespace lrb
