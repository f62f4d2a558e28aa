#include "lrb/phase1.hpp"

#include "lrb/restart.hpp"

#include <cmath>
#include <sstream>

namespace lrb {

void Phase1Config::validate() const
{
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("phase1: delta must lie in (0, 1)");
  if (!(tauTol >= 0.0))
    throw std::invalid_argument("phase1: tauTol must be nonnegative");
  if (maxit < 1 || changeit < 1 || restartit < 1)
    throw std::invalid_argument("phase1: iteration counts must be at least 1");
  if (!(restarttol > 0.0))
    throw std::invalid_argument("phase1: restarttol must be positive");
}

namespace {

void checkStart(const MatrixSubspace& sub, const Matrix& X0)
{
  if (X0.rows() != sub.rows() || X0.cols() != sub.cols())
    throw std::invalid_argument("initial guess has the wrong shape");
  const double nrm = X0.norm();
  if (std::abs(nrm - 1.0) > 1e-8)
    throw std::invalid_argument("initial guess is not normalized (norm " + std::to_string(nrm) + ")");
  const double outside = (X0 - project(Projector::full(sub), X0)).norm();
  if (outside > 1e-8)
    throw std::invalid_argument("initial guess lies outside the subspace (distance " + std::to_string(outside) +
                                ")");
}

} // namespace

Phase1Result estimateRank(const MatrixSubspace& sub, const Matrix& X0, const Phase1Config& cfg,
                          const std::optional<Projector>& restartProj, Rng& rng, const TraceContext& ctx)
{
  cfg.validate();
  checkStart(sub, X0);
  const Projector P = Projector::full(sub);

  Phase1Result res;
  res.X = X0;
  res.rankEstimate = std::min(sub.rows(), sub.cols());
  std::size_t unchanged = 0;
  bool pendingRestart = false;

  for (std::size_t it = 1; it <= cfg.maxit; ++it) {
    SvdResult s = kernels::svd(res.X);

    TraceRow row;
    row.element = ctx.element;
    row.phase = 1;
    row.iteration = ctx.firstIteration + it - 1;
    row.singularValues = s.singularValues;
    row.restartFired = pendingRestart;
    row.svdCount = ctx.svdCountBefore + it;
    pendingRestart = false;

    const Eigen::Index numSv = s.singularValues.size();
    const Eigen::Index effective = (s.singularValues.array() > cfg.tauTol).count();
    if (effective == 0) {
      res.trace.rows.push_back(row);
      if (ctx.sink)
        ctx.sink(row);
      std::ostringstream msg;
      msg << "phase1: all singular values <= tauTol (" << cfg.tauTol << ") at iteration " << it;
      throw DegenerateIterateError(msg.str(), res.trace);
    }

    if (cfg.removeNoise && effective < numSv) {
      s.singularValues.tail(numSv - effective).setZero();
      s.singularValues /= s.singularValues.norm();
    }

    const double tau = cfg.delta / std::sqrt(static_cast<double>(effective));
    const Vector shrunk = (s.singularValues.array() - tau).max(0.0).matrix();
    const Eigen::Index rankY = (shrunk.array() > 0.0).count();
    res.Y = s.U * shrunk.asDiagonal() * s.V.transpose();

    if (rankY < res.rankEstimate) {
      res.rankEstimate = rankY;
      unchanged = 0;
    } else {
      ++unchanged;
    }

    // ||X - S_tau(X)||_F for the (noise-free, renormalized) iterate
    row.residual = s.singularValues.cwiseMin(tau).norm();
    row.rankEstimate = res.rankEstimate;
    res.trace.rows.push_back(row);
    if (ctx.sink)
      ctx.sink(row);

    Matrix Xn = project(P, res.Y);
    const double nrm = Xn.norm();
    if (!(nrm > 0.0))
      throw DegenerateIterateError("phase1: projection of the shrunk iterate vanished", res.trace);
    res.X = Xn / nrm;
    res.iterations = it;

    if (restartProj && it % cfg.restartit == 0) {
      bool fired = false;
      res.X = restartCheck(*restartProj, res.X, cfg.restarttol, rng, &fired);
      if (fired) {
        ++res.restarts;
        pendingRestart = true;
      }
    }

    if (unchanged >= cfg.changeit)
      break;
  }
  return res;
}

} // namespace lrb
