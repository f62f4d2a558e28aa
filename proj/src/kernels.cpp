#include "lrb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lrb::kernels {

bool allFinite(const Matrix& X) { return X.allFinite(); }

SvdResult svd(const Matrix& X)
{
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("svd: empty matrix");
  if (!X.allFinite())
    throw std::invalid_argument("svd: matrix contains non-finite entries");

  // BDCSVD switches to one-sided Jacobi below its block size, which covers
  // the typical 20x20 case with full relative accuracy.
  Eigen::BDCSVD<Matrix> dec(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  // BDCSVD can return NaN vectors when exact zero singular values are deflated.
  if (!out.U.allFinite() || !out.V.allFinite() || !out.singularValues.allFinite()) {
    Eigen::JacobiSVD<Matrix> jac(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = SvdResult{jac.matrixU(), jac.singularValues(), jac.matrixV()};
  }

  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    Eigen::Index imax = 0;
    out.U.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.U(imax, j) < 0.0) {
      out.U.col(j) = -out.U.col(j);
      out.V.col(j) = -out.V.col(j);
    }
  }
  return out;
}

Matrix shrink(const SvdResult& s, double tau)
{
  if (!(tau > 0.0))
    throw std::invalid_argument("shrink: tau must be positive");
  const Vector shrunk = (s.singularValues.array() - tau).max(0.0).matrix();
  return s.U * shrunk.asDiagonal() * s.V.transpose();
}

Matrix shrink(const Matrix& X, double tau)
{
  if (!(tau > 0.0))
    throw std::invalid_argument("shrink: tau must be positive");
  return shrink(svd(X), tau);
}

Matrix truncate(const SvdResult& s, Eigen::Index r)
{
  const Eigen::Index k = s.singularValues.size();
  if (r < 1 || r > k) {
    std::ostringstream msg;
    msg << "truncate: rank " << r << " outside [1, " << k << "]";
    throw std::invalid_argument(msg.str());
  }
  return s.U.leftCols(r) * s.singularValues.head(r).asDiagonal() * s.V.leftCols(r).transpose();
}

Matrix truncate(const Matrix& X, Eigen::Index r)
{
  const Eigen::Index k = std::min(X.rows(), X.cols());
  if (r < 1 || r > k) {
    std::ostringstream msg;
    msg << "truncate: rank " << r << " outside [1, " << k << "]";
    throw std::invalid_argument(msg.str());
  }
  return truncate(svd(X), r);
}

double truncationError(const Vector& singularValues, Eigen::Index r)
{
  if (r >= singularValues.size())
    return 0.0;
  return singularValues.tail(singularValues.size() - r).norm();
}

double nuclearNorm(const Matrix& X) { return svd(X).singularValues.sum(); }

Matrix orthonormalColumns(const Matrix& A)
{
  if (A.cols() == 0)
    return Matrix(A.rows(), 0);
  if (A.cols() > A.rows())
    throw RankDeficientError("orthonormalColumns: more columns than rows", A.rows(), A.cols());

  const Vector sv = Eigen::JacobiSVD<Matrix>(A).singularValues();
  const double cutoff = kFullRankThreshold * sv(0);
  const Eigen::Index rank = (sv.array() > cutoff).count();
  if (sv(0) == 0.0 || rank < A.cols()) {
    std::ostringstream msg;
    msg << "orthonormalColumns: numerical rank " << rank << " of " << A.cols() << " columns ("
        << A.cols() - rank << " deficient)";
    throw RankDeficientError(msg.str(), rank, A.cols());
  }

  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  // Second Householder pass: Q^T Q = I to working precision.
  Eigen::HouseholderQR<Matrix> qr2(Q);
  Matrix Q2 = qr2.householderQ() * Matrix::Identity(A.rows(), A.cols());
  // Keep the orientation of the first pass.
  for (Eigen::Index j = 0; j < Q2.cols(); ++j)
    if (Q2.col(j).dot(Q.col(j)) < 0.0)
      Q2.col(j) = -Q2.col(j);
  return Q2;
}

Matrix pseudoInverse(const Matrix& A)
{
  if (A.size() == 0)
    return Matrix(A.cols(), A.rows());
  if (!A.allFinite())
    throw std::invalid_argument("pseudoInverse: matrix contains non-finite entries");
  const SvdResult s = svd(A);
  const double smax = s.singularValues.size() ? s.singularValues(0) : 0.0;
  if (smax == 0.0)
    return Matrix::Zero(A.cols(), A.rows());
  const double cutoff =
    static_cast<double>(std::max(A.rows(), A.cols())) * std::numeric_limits<double>::epsilon() * smax;
  Vector inv = s.singularValues;
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
  return s.V * inv.asDiagonal() * s.U.transpose();
}

Vector vec(const Matrix& X) { return Eigen::Map<const Vector>(X.data(), X.size()); }

Matrix mat(const Eigen::Ref<const Vector>& x, Eigen::Index rows, Eigen::Index cols)
{
  if (x.size() != rows * cols)
    throw std::invalid_argument("mat: vector length does not match rows * cols");
  Matrix X(rows, cols);
  Eigen::Map<Vector>(X.data(), X.size()) = x;
  return X;
}

Matrix khatriRao(const Matrix& B, const Matrix& A)
{
  if (A.cols() != B.cols())
    throw std::invalid_argument("khatriRao: factor matrices need the same number of columns");
  Matrix K(A.rows() * B.rows(), A.cols());
  for (Eigen::Index l = 0; l < A.cols(); ++l)
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      K.col(l).segment(j * A.rows(), A.rows()) = B(j, l) * A.col(l);
  return K;
}

double largestPrincipalSine(const Matrix& Qlarge, const Matrix& Qsmall)
{
  if (Qlarge.rows() != Qsmall.rows())
    throw std::invalid_argument("principal angle: ambient dimensions differ");
  if (Qsmall.cols() == 0)
    return 0.0;
  const Matrix R = Qsmall - Qlarge * (Qlarge.transpose() * Qsmall);
  const double s = Eigen::JacobiSVD<Matrix>(R).singularValues()(0);
  return std::min(1.0, s);
}

double smallestPrincipalSine(const Matrix& Qa, const Matrix& Qb)
{
  if (Qa.rows() != Qb.rows())
    throw std::invalid_argument("principal angle: ambient dimensions differ");
  if (Qa.cols() == 0 || Qb.cols() == 0)
    return 1.0;
  const Matrix R = Qa - Qb * (Qb.transpose() * Qa);
  const Vector sv = Eigen::JacobiSVD<Matrix>(R).singularValues();
  // Fewer singular values than columns means R has a nontrivial null space.
  if (sv.size() < Qa.cols())
    return 0.0;
  return std::min(1.0, sv(sv.size() - 1));
}

} // namespace lrb::kernels
