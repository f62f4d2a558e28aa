#include "lrb/phase2.hpp"

#include "lrb/restart.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lrb {

void Phase2Config::validate(Eigen::Index m, Eigen::Index n) const
{
  if (r < 1)
    throw std::invalid_argument("phase2: target rank must be at least 1");
  if (m > 0 && n > 0 && r > std::min(m, n))
    throw std::invalid_argument("phase2: target rank " + std::to_string(r) + " exceeds min(m, n)");
  if (!(tol > 0.0))
    throw std::invalid_argument("phase2: tol must be positive");
  if (maxit < 1 || restartit < 1)
    throw std::invalid_argument("phase2: iteration counts must be at least 1");
  if (!(restarttol > 0.0))
    throw std::invalid_argument("phase2: restarttol must be positive");
}

Phase2Result refineToRank(const MatrixSubspace& sub, const Matrix& X0, const Phase2Config& cfg,
                          const std::optional<Projector>& restartProj, Rng& rng, const TraceContext& ctx)
{
  cfg.validate(sub.rows(), sub.cols());
  if (X0.rows() != sub.rows() || X0.cols() != sub.cols())
    throw std::invalid_argument("phase2: initial guess has the wrong shape");
  if (std::abs(X0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("phase2: initial guess is not normalized");
  const Projector P = Projector::full(sub);
  if ((X0 - project(P, X0)).norm() > 1e-8)
    throw std::invalid_argument("phase2: initial guess lies outside the subspace");

  Phase2Result res;
  res.X = X0;
  bool pendingRestart = false;

  for (std::size_t it = 1;; ++it) {
    const SvdResult s = kernels::svd(res.X);
    const double err = kernels::truncationError(s.singularValues, cfg.r);
    if (!res.truncationErrors.empty()) {
      const double prev = res.truncationErrors.back();
      res.convergenceFactors.push_back(prev > 0.0 ? err / prev : 0.0);
    }
    res.truncationErrors.push_back(err);
    res.iterations = it;

    TraceRow row;
    row.element = ctx.element;
    row.phase = 2;
    row.iteration = ctx.firstIteration + it - 1;
    row.singularValues = s.singularValues;
    row.rankEstimate = cfg.r;
    row.residual = err;
    row.restartFired = pendingRestart;
    row.svdCount = ctx.svdCountBefore + it;
    pendingRestart = false;
    res.trace.rows.push_back(row);
    if (ctx.sink)
      ctx.sink(row);

    res.Y = kernels::truncate(s, cfg.r);
    res.residual = err;
    if (err <= cfg.tol) {
      res.converged = true;
      break;
    }
    if (it >= cfg.maxit)
      break;

    Matrix Xn = project(P, res.Y);
    const double nrm = Xn.norm();
    if (!(nrm > 0.0))
      throw DegenerateIterateError("phase2: projection of the rank-" + std::to_string(cfg.r) +
                                     " approximation vanished",
                                   res.trace);
    res.X = Xn / nrm;

    if (restartProj && it % cfg.restartit == 0) {
      bool fired = false;
      res.X = restartCheck(*restartProj, res.X, cfg.restarttol, rng, &fired);
      if (fired) {
        ++res.restarts;
        pendingRestart = true;
      }
    }
  }
  return res;
}

double tangentAngle(const Matrix& Xstar, const MatrixSubspace& sub, Eigen::Index r)
{
  if (Xstar.rows() != sub.rows() || Xstar.cols() != sub.cols())
    throw std::invalid_argument("tangentAngle: shape mismatch");
  const Eigen::Index m = sub.rows(), n = sub.cols();
  if (r < 1 || r > std::min(m, n))
    throw std::invalid_argument("tangentAngle: rank out of range");

  Eigen::JacobiSVD<Matrix> dec(Xstar, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = dec.singularValues();
  const double cutoff = kernels::kFullRankThreshold * sv(0);
  if (!(sv(r - 1) > cutoff) || (r < sv.size() && sv(r) > cutoff)) {
    std::ostringstream msg;
    msg << "tangentAngle: matrix does not have numerical rank " << r;
    throw std::invalid_argument(msg.str());
  }

  const Eigen::Index d = sub.dim();
  if (d == 1)
    return std::numbers::pi / 2;
  if ((m - r) * (n - r) < d - 1)
    return 0.0;

  const Projector comp = complementProjector(sub, {Xstar});
  const Matrix Uperp = dec.matrixU().rightCols(m - r);
  const Matrix Vperp = dec.matrixV().rightCols(n - r);
  // Normal-space coordinates of each orthonormal tangent direction of the sphere.
  Matrix N((m - r) * (n - r), comp.dim());
  for (Eigen::Index j = 0; j < comp.dim(); ++j) {
    const Matrix q = kernels::mat(comp.columns().col(j), m, n);
    N.col(j) = kernels::vec(Uperp.transpose() * q * Vperp);
  }
  const Vector nsv = Eigen::JacobiSVD<Matrix>(N).singularValues();
  return std::asin(std::min(1.0, nsv(nsv.size() - 1)));
}

namespace {

Matrix numericalRange(const SvdResult& s, const Matrix& U)
{
  const double cutoff = kernels::kFullRankThreshold * s.singularValues(0);
  const Eigen::Index k = (s.singularValues.array() > cutoff).count();
  return U.leftCols(k);
}

} // namespace

bool lemma2Check(const Matrix& Xstar, const std::vector<Matrix>& complementBasis)
{
  if (complementBasis.empty())
    return true;
  const SvdResult xs = kernels::svd(Xstar);
  const Matrix colX = numericalRange(xs, xs.U);
  const Matrix rowX = numericalRange(xs, xs.V);

  Rng rng(0x5eed2u);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kSamples = 32;
  constexpr double kMinAngle = 1e-8;
  for (int t = 0; t < kSamples; ++t) {
    Matrix Xt = Matrix::Zero(Xstar.rows(), Xstar.cols());
    for (const auto& B : complementBasis)
      Xt += normal(rng) * B;
    if (Xt.norm() == 0.0)
      continue;
    const SvdResult ts = kernels::svd(Xt);
    const double colAngle = std::asin(kernels::smallestPrincipalSine(colX, numericalRange(ts, ts.U)));
    const double rowAngle = std::asin(kernels::smallestPrincipalSine(rowX, numericalRange(ts, ts.V)));
    if (!(colAngle > kMinAngle) || !(rowAngle > kMinAngle))
      return false;
  }
  return true;
}

} // namespace lrb
