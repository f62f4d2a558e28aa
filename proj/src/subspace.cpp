#include "lrb/subspace.hpp"

#include <cmath>
#include <sstream>

namespace lrb {

MatrixSubspace::MatrixSubspace(Eigen::Index m, Eigen::Index n, Matrix basisQ)
  : m_(m), n_(n), basisQ_(std::move(basisQ))
{
  if (m < 1 || n < 1)
    throw std::invalid_argument("MatrixSubspace: dimensions must be positive");
  if (basisQ_.rows() != m * n)
    throw std::invalid_argument("MatrixSubspace: basis has the wrong number of rows");
  if (basisQ_.cols() > m * n)
    throw std::invalid_argument("MatrixSubspace: dimension exceeds mn");
}

Matrix MatrixSubspace::element(Eigen::Index j) const { return kernels::mat(basisQ_.col(j), m_, n_); }

Projector::Projector(Eigen::Index m, Eigen::Index n, Matrix columns, ProjectorKind kind)
  : m_(m), n_(n), columns_(std::move(columns)), kind_(kind)
{
  if (columns_.rows() != m * n)
    throw std::invalid_argument("Projector: column block has the wrong number of rows");
}

Projector Projector::full(const MatrixSubspace& sub)
{
  return Projector(sub.rows(), sub.cols(), sub.basis(), ProjectorKind::Full);
}

Matrix Projector::apply(const Matrix& Y) const
{
  if (Y.rows() != m_ || Y.cols() != n_) {
    std::ostringstream msg;
    msg << "project: expected " << m_ << "x" << n_ << " matrix, got " << Y.rows() << "x" << Y.cols();
    throw std::invalid_argument(msg.str());
  }
  if (columns_.cols() == 0)
    return Matrix::Zero(m_, n_);
  const Eigen::Map<const Vector> y(Y.data(), Y.size());
  const Vector coeff = columns_.transpose() * y;
  const Vector p = columns_ * coeff;
  return kernels::mat(p, m_, n_);
}

Matrix stackVectorized(const std::vector<Matrix>& mats)
{
  if (mats.empty())
    return Matrix();
  const Eigen::Index m = mats.front().rows();
  const Eigen::Index n = mats.front().cols();
  Matrix S(m * n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t j = 0; j < mats.size(); ++j) {
    if (mats[j].rows() != m || mats[j].cols() != n)
      throw std::invalid_argument("stackVectorized: matrices differ in shape");
    S.col(static_cast<Eigen::Index>(j)) = kernels::vec(mats[j]);
  }
  return S;
}

MatrixSubspace buildSubspace(const std::vector<Matrix>& spanning)
{
  if (spanning.empty())
    throw std::invalid_argument("buildSubspace: empty spanning set");
  const Matrix S = stackVectorized(spanning);
  return MatrixSubspace(spanning.front().rows(), spanning.front().cols(), kernels::orthonormalColumns(S));
}

Matrix project(const Projector& P, const Matrix& Y) { return P.apply(Y); }

namespace {

Matrix chosenBasis(const MatrixSubspace& sub, const std::vector<Matrix>& chosen)
{
  if (chosen.empty())
    return Matrix(sub.rows() * sub.cols(), 0);
  const Matrix S = stackVectorized(chosen);
  if (chosen.front().rows() != sub.rows() || chosen.front().cols() != sub.cols())
    throw std::invalid_argument("complementProjector: chosen matrices have the wrong shape");
  const Matrix& Q = sub.basis();
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    const double nrm = S.col(j).norm();
    const double outside = (S.col(j) - Q * (Q.transpose() * S.col(j))).norm();
    if (!(outside <= 1e-8 * nrm)) {
      std::ostringstream msg;
      msg << "complementProjector: chosen matrix " << j << " lies outside the subspace (residual "
          << outside / nrm << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return kernels::orthonormalColumns(S);
}

} // namespace

Projector partialProjector(const MatrixSubspace& sub, const std::vector<Matrix>& chosen)
{
  return Projector(sub.rows(), sub.cols(), chosenBasis(sub, chosen), ProjectorKind::Partial);
}

Projector complementProjector(const MatrixSubspace& sub, const std::vector<Matrix>& chosen)
{
  const Matrix& Q = sub.basis();
  const Eigen::Index d = sub.dim();
  if (chosen.empty())
    return Projector(sub.rows(), sub.cols(), Q, ProjectorKind::Complement);
  const Matrix C = chosenBasis(sub, chosen);
  if (C.cols() > d)
    throw std::invalid_argument("complementProjector: more chosen matrices than the subspace dimension");
  if (C.cols() == d)
    return Projector(sub.rows(), sub.cols(), Matrix(Q.rows(), 0), ProjectorKind::Complement);

  // Coefficients of the chosen basis in Q; the complement inside span(Q) is
  // spanned by the trailing left singular vectors of that d x l block.
  const Matrix coeff = Q.transpose() * C;
  Eigen::JacobiSVD<Matrix> dec(coeff, Eigen::ComputeFullU);
  const Matrix W = dec.matrixU().rightCols(d - C.cols());
  Matrix cols = Q * W;
  // Purge any residual component along the chosen directions.
  cols -= C * (C.transpose() * cols);
  return Projector(sub.rows(), sub.cols(), kernels::orthonormalColumns(cols), ProjectorKind::Complement);
}

Matrix randomElement(const Projector& P, Rng& rng)
{
  if (P.dim() == 0)
    throw std::invalid_argument("randomElement: projector has dimension zero");
  const Vector c = gaussianMatrix(P.dim(), 1, rng).col(0);
  Vector x = P.columns() * c;
  x /= x.norm();
  return kernels::mat(x, P.rows(), P.cols());
}

double subspaceAngle(const MatrixSubspace& A, const MatrixSubspace& B)
{
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("subspaceAngle: ambient dimensions differ");
  const bool aLarger = A.dim() >= B.dim();
  const Matrix& large = aLarger ? A.basis() : B.basis();
  const Matrix& small = aLarger ? B.basis() : A.basis();
  return std::asin(kernels::largestPrincipalSine(large, small));
}

} // namespace lrb
