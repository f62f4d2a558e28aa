#include "lrb/cp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lrb {

Tensor3::Tensor3(std::vector<Matrix> s) : slices(std::move(s))
{
  if (slices.empty())
    throw std::invalid_argument("Tensor3: no slices");
  m = slices.front().rows();
  n = slices.front().cols();
  for (const auto& M : slices)
    if (M.rows() != m || M.cols() != n)
      throw std::invalid_argument("Tensor3: slices differ in shape");
}

Tensor3 Tensor3::fromSubspace(const MatrixSubspace& sub)
{
  std::vector<Matrix> s;
  for (Eigen::Index j = 0; j < sub.dim(); ++j)
    s.push_back(sub.element(j));
  return Tensor3(std::move(s));
}

Matrix matricize(const Tensor3& T) { return stackVectorized(T.slices); }

Tensor3 reconstruct(const CpFactors& F)
{
  std::vector<Matrix> s;
  for (Eigen::Index k = 0; k < F.C.rows(); ++k)
    s.push_back(F.A * F.C.row(k).transpose().asDiagonal() * F.B.transpose());
  return Tensor3(std::move(s));
}

namespace {

void checkShapes(const Tensor3& T, const CpFactors& F)
{
  const Eigen::Index R = F.A.cols();
  if (F.A.rows() != T.m || F.B.rows() != T.n || F.C.rows() != T.d() || F.B.cols() != R || F.C.cols() != R)
    throw std::invalid_argument("CP factors do not match the tensor");
}

double residualNorm(const Tensor3& T, const CpFactors& F)
{
  checkShapes(T, F);
  double sq = 0.0;
  for (Eigen::Index k = 0; k < T.d(); ++k)
    sq += (T.slices[k] - F.A * F.C.row(k).transpose().asDiagonal() * F.B.transpose()).squaredNorm();
  return std::sqrt(sq);
}

double tensorNorm(const Tensor3& T)
{
  double sq = 0.0;
  for (const auto& M : T.slices)
    sq += M.squaredNorm();
  return std::sqrt(sq);
}

} // namespace

double cpRelativeResidual(const Tensor3& T, const CpFactors& F)
{
  const double r = residualNorm(T, F);
  const double t = tensorNorm(T);
  return t > 0.0 ? r / t : r;
}

double cpObjective(const Tensor3& T, const CpFactors& F)
{
  const double r = residualNorm(T, F);
  return 0.5 * r * r;
}

CpFactors normalizeFactors(const CpFactors& F)
{
  CpFactors out = F;
  for (Eigen::Index l = 0; l < F.A.cols(); ++l) {
    const double a = out.A.col(l).norm();
    const double b = out.B.col(l).norm();
    if (a > 0.0 && b > 0.0) {
      out.A.col(l) /= a;
      out.B.col(l) /= b;
      out.C.col(l) *= a * b;
    }
  }
  return out;
}

namespace {

// Leading d left singular vectors of a wide matrix; CpError when its rank is below d.
Matrix leadingSingularVectors(const Matrix& W, Eigen::Index d, const char* which)
{
  const SvdResult s = kernels::svd(W);
  if (!(s.singularValues(d - 1) > kernels::kFullRankThreshold * s.singularValues(0))) {
    std::ostringstream msg;
    msg << "leurgans: factor " << which << " does not have full column rank " << d;
    throw CpError(msg.str());
  }
  return s.U.leftCols(d);
}

struct Pencil {
  Matrix vectors;
  Vector values;
  std::string problem;
};

// Real eigenpairs of E sorted by eigenvalue, or a description of why they are unusable.
Pencil realSortedEigen(const Matrix& E)
{
  Pencil p;
  Eigen::EigenSolver<Matrix> es(E);
  if (es.info() != Eigen::Success) {
    p.problem = "eigensolver failed";
    return p;
  }
  const Eigen::VectorXcd lam = es.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    p.problem = "zero pencil";
    return p;
  }
  if (lam.imag().cwiseAbs().maxCoeff() > 1e-8 * scale) {
    p.problem = "complex eigenvalues";
    return p;
  }
  const Eigen::Index d = E.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return lam(a).real() < lam(b).real(); });
  p.values.resize(d);
  p.vectors.resize(d, d);
  const Eigen::MatrixXcd V = es.eigenvectors();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index i = order[static_cast<std::size_t>(j)];
    p.values(j) = lam(i).real();
    // Rotate the complex scale of the eigenvector onto the real axis.
    const Eigen::VectorXcd v = V.col(i);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> phase = v(imax) / std::abs(v(imax));
    p.vectors.col(j) = (v / phase).real();
  }
  for (Eigen::Index j = 1; j < d; ++j)
    if (p.values(j) - p.values(j - 1) < 1e-8 * scale) {
      p.problem = "clustered eigenvalues";
      return p;
    }
  return p;
}

} // namespace

CpFactors leurgansDecompose(const Tensor3& T, Rng& rng)
{
  const Eigen::Index m = T.m, n = T.n, d = T.d();
  if (d < 1)
    throw std::invalid_argument("leurgans: empty tensor");
  if (d > std::min(m, n)) {
    std::ostringstream msg;
    msg << "leurgans: needs d <= min(m, n), got d = " << d << " for " << m << "x" << n << " slices";
    throw std::invalid_argument(msg.str());
  }

  Matrix wideA(m, n * d), wideB(n, m * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    wideA.middleCols(k * n, n) = T.slices[k];
    wideB.middleCols(k * m, m) = T.slices[k].transpose();
  }
  const Matrix Ua = leadingSingularVectors(wideA, d, "A");
  const Matrix Vb = leadingSingularVectors(wideB, d, "B");
  std::vector<Matrix> G;
  for (const auto& M : T.slices)
    G.push_back(Ua.transpose() * M * Vb);

  std::string lastProblem;
  constexpr int kTries = 3;
  for (int t = 0; t < kTries; ++t) {
    const Vector alpha = gaussianMatrix(d, 1, rng).col(0);
    const Vector beta = gaussianMatrix(d, 1, rng).col(0);
    Matrix Ga = Matrix::Zero(d, d), Gb = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Ga += alpha(k) * G[k];
      Gb += beta(k) * G[k];
    }
    Eigen::FullPivLU<Matrix> lu(Gb);
    if (!lu.isInvertible()) {
      lastProblem = "singular combination";
      continue;
    }
    const Matrix GbInv = lu.inverse();
    const Pencil pa = realSortedEigen(Ga * GbInv);
    if (!pa.problem.empty()) {
      lastProblem = pa.problem;
      continue;
    }
    const Pencil pb = realSortedEigen(Ga.transpose() * GbInv.transpose());
    if (!pb.problem.empty()) {
      lastProblem = pb.problem;
      continue;
    }

    CpFactors F;
    F.A = Ua * pa.vectors;
    F.B = Vb * pb.vectors;
    const Matrix Ap = kernels::pseudoInverse(F.A);
    const Matrix BtP = kernels::pseudoInverse(F.B.transpose());
    F.C.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      F.C.row(k) = (Ap * T.slices[k] * BtP).diagonal().transpose();
    F = normalizeFactors(F);

    const double res = cpRelativeResidual(T, F);
    if (!(res <= 1e-8)) {
      std::ostringstream msg;
      msg << "leurgans: reconstruction residual " << res << " exceeds 1e-8";
      throw CpError(msg.str());
    }
    return F;
  }
  throw CpError("leurgans: non-generic instance (" + lastProblem + " in " + std::to_string(kTries) +
                " random combinations)");
}

namespace {

Matrix solveGram(const Matrix& rhs, const Matrix& G, const char* block)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Vector& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (!(top > 0.0) || !(ev(0) > 1e-13 * top)) {
    std::ostringstream msg;
    msg << "als: normal equations for block " << block << " are rank deficient (lambda_min / lambda_max = "
        << (top > 0.0 ? ev(0) / top : 0.0) << ")";
    throw CpRankDeficientError(msg.str(), block);
  }
  // rhs * G^{-1}, G symmetric positive definite.
  return (es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * rhs.transpose())
    .transpose();
}

} // namespace

CpFactors alsRefine(const Tensor3& T, const CpFactors& init, std::size_t sweeps, std::vector<double>* objectives)
{
  checkShapes(T, init);
  if (sweeps < 1)
    throw std::invalid_argument("als: sweeps must be at least 1");
  CpFactors F = init;
  const Eigen::Index R = F.A.cols();
  const Eigen::Index d = T.d();

  for (std::size_t s = 0; s < sweeps; ++s) {
    // A: M_k ~ A diag(c_k) B^T, so sum_k M_k B diag(c_k) = A [(C^T C) .* (B^T B)].
    {
      Matrix rhs = Matrix::Zero(T.m, R);
      for (Eigen::Index k = 0; k < d; ++k)
        rhs += T.slices[k] * F.B * F.C.row(k).transpose().asDiagonal();
      const Matrix G = (F.C.transpose() * F.C).cwiseProduct(F.B.transpose() * F.B);
      F.A = solveGram(rhs, G, "A");
    }
    {
      Matrix rhs = Matrix::Zero(T.n, R);
      for (Eigen::Index k = 0; k < d; ++k)
        rhs += T.slices[k].transpose() * F.A * F.C.row(k).transpose().asDiagonal();
      const Matrix G = (F.C.transpose() * F.C).cwiseProduct(F.A.transpose() * F.A);
      F.B = solveGram(rhs, G, "B");
    }
    {
      Matrix rhs(d, R);
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < R; ++l)
          rhs(k, l) = F.A.col(l).dot(T.slices[k] * F.B.col(l));
      const Matrix G = (F.B.transpose() * F.B).cwiseProduct(F.A.transpose() * F.A);
      F.C = solveGram(rhs, G, "C");
    }
    F = normalizeFactors(F);
    if (objectives)
      objectives->push_back(cpObjective(T, F));
  }
  return F;
}

CpFactors randomFactors(Eigen::Index m, Eigen::Index n, Eigen::Index d, Rng& rng)
{
  CpFactors F;
  F.A = gaussianMatrix(m, d, rng);
  F.B = gaussianMatrix(n, d, rng);
  F.C = gaussianMatrix(d, d, rng);
  return F;
}

BasisResult rankOneBasisViaCp(const MatrixSubspace& sub, std::uint64_t seed, CpReport* report)
{
  const Tensor3 T = Tensor3::fromSubspace(sub);
  CpReport rep;
  std::optional<CpFactors> F;
  {
    Rng rng(deriveSeed(seed, {0}));
    try {
      F = leurgansDecompose(T, rng);
    } catch (const std::exception& e) {
      rep.leurgansFailure = e.what();
    }
  }
  if (!F) {
    rep.usedAls = true;
    Rng rng(deriveSeed(seed, {1}));
    std::string alsFailure;
    try {
      CpFactors G = alsRefine(T, randomFactors(T.m, T.n, T.d(), rng), 500);
      if (cpRelativeResidual(T, G) <= 1e-8)
        F = G;
      else
        alsFailure = "ALS residual " + std::to_string(cpRelativeResidual(T, G)) + " above 1e-8";
    } catch (const CpError& e) {
      alsFailure = e.what();
    }
    if (!F)
      throw CpError("no rank-one basis via CP (Leurgans: " + rep.leurgansFailure + "; " + alsFailure +
                    "); use the greedy solver instead");
  }
  rep.residual = cpRelativeResidual(T, *F);

  const Projector P = Projector::full(sub);
  BasisResult out;
  std::vector<Matrix> mats;
  for (Eigen::Index l = 0; l < F->A.cols(); ++l) {
    BasisElement e;
    e.X = F->A.col(l) * F->B.col(l).transpose();
    e.X /= e.X.norm();
    e.rank = 1;
    e.phase2Residual = (e.X - P.apply(e.X)).norm();
    e.converged = true;
    mats.push_back(e.X);
    out.elements.push_back(std::move(e));
  }
  out.totalRank = static_cast<Eigen::Index>(out.elements.size());
  if (!(independenceMeasure(mats) > 1e-8))
    throw CpError("CP factors give a dependent rank-one set; use the greedy solver instead");
  out.subspaceAngleToInput = subspaceAngle(buildSubspace(mats), sub);
  if (report)
    *report = rep;
  return out;
}

std::vector<Eigen::Index> matchColumns(const Matrix& reference, const Matrix& estimate)
{
  if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols())
    throw std::invalid_argument("matchColumns: shape mismatch");
  const Eigen::Index k = reference.cols();
  Matrix cosines(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double den = reference.col(i).norm() * estimate.col(j).norm();
      cosines(i, j) = den > 0.0 ? std::abs(reference.col(i).dot(estimate.col(j))) / den : 0.0;
    }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k), -1);
  std::vector<bool> usedRef(static_cast<std::size_t>(k)), usedEst(static_cast<std::size_t>(k));
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        if (!usedRef[i] && !usedEst[j] && cosines(i, j) > best) {
          best = cosines(i, j);
          bi = i;
          bj = j;
        }
    usedRef[bi] = usedEst[bj] = true;
    perm[bi] = bj;
  }
  return perm;
}

} // namespace lrb
