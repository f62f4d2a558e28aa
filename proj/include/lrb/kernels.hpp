#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lrb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition X = U diag(sigma) V^T with k = min(m, n).
///
/// Singular values are non-increasing. Column signs are fixed so that the
/// largest-magnitude entry of every column of U is positive (V follows).
struct SvdResult {
  Matrix U;
  Vector singularValues;
  Matrix V;
};

/// Thrown when a matrix that must have full column rank does not.
class RankDeficientError : public std::runtime_error {
public:
  RankDeficientError(const std::string& what, Eigen::Index numericalRank, Eigen::Index columns)
    : std::runtime_error(what), numericalRank_(numericalRank), columns_(columns) {}

  Eigen::Index numericalRank() const { return numericalRank_; }
  Eigen::Index deficientColumns() const { return columns_ - numericalRank_; }

private:
  Eigen::Index numericalRank_;
  Eigen::Index columns_;
};

namespace kernels {

/// Relative threshold below which a column set counts as numerically dependent.
inline constexpr double kFullRankThreshold = 1e-10;

bool allFinite(const Matrix& X);

SvdResult svd(const Matrix& X);

/// Singular value shrinkage: U diag((sigma_i - tau)_+) V^T.
Matrix shrink(const Matrix& X, double tau);
/// Shrinkage applied to an existing decomposition.
Matrix shrink(const SvdResult& s, double tau);

/// Best rank-r approximation in Frobenius norm.
Matrix truncate(const Matrix& X, Eigen::Index r);
Matrix truncate(const SvdResult& s, Eigen::Index r);

/// ||X - T_r(X)||_F computed from the trailing singular values.
double truncationError(const Vector& singularValues, Eigen::Index r);

double nuclearNorm(const Matrix& X);

/// Orthonormal basis of the column span of A (thin QR factor).
/// Throws RankDeficientError when sigma_min <= 1e-10 * sigma_max.
Matrix orthonormalColumns(const Matrix& A);

/// Moore-Penrose pseudoinverse, with singular values below
/// max(m, n) * eps * sigma_max treated as zero.
Matrix pseudoInverse(const Matrix& A);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& X);
Matrix mat(const Eigen::Ref<const Vector>& x, Eigen::Index rows, Eigen::Index cols);

/// Column-wise Kronecker product: column l equals kron(B.col(l), A.col(l)),
/// so that vec(a b^T) = kron(b, a) lines up with column-stacking.
Matrix khatriRao(const Matrix& B, const Matrix& A);

/// sin of the largest principal angle of span(Qsmall) into span(Qlarge),
/// both with orthonormal columns.
double largestPrincipalSine(const Matrix& Qlarge, const Matrix& Qsmall);

/// sin of the smallest principal angle between span(Qa) and span(Qb).
double smallestPrincipalSine(const Matrix& Qa, const Matrix& Qb);

} // namespace kernels
} // namespace lrb
