#include "lrb/greedy.hpp"

#include <algorithm>
#include <sstream>

namespace lrb {

Matrix restartCheck(const Projector& Q, const Matrix& X, double restarttol, Rng& rng, bool* fired)
{
  if (!(restarttol > 0.0))
    throw std::invalid_argument("restartCheck: restarttol must be positive");
  const bool fire = Q.apply(X).norm() < restarttol;
  if (fired)
    *fired = fire;
  if (!fire)
    return X;
  if (Q.dim() == 0)
    throw std::runtime_error("restartCheck: subspace exhausted, no complement left to restart from");
  return randomElement(Q, rng);
}

void SolverConfig::validate() const
{
  phase1.validate();
  if (!(restarttol > 0.0))
    throw std::invalid_argument("solver: restarttol must be positive");
  if (numStarts < 1)
    throw std::invalid_argument("solver: numStarts must be at least 1");
}

bool BasisResult::allConverged() const
{
  return std::all_of(elements.begin(), elements.end(), [](const BasisElement& e) { return e.converged; });
}

IterationTrace BasisResult::combinedTrace() const
{
  IterationTrace all;
  for (const auto& t : traces)
    all.append(t);
  return all;
}

double independenceMeasure(const std::vector<Matrix>& mats)
{
  if (mats.empty())
    return 0.0;
  Matrix S = stackVectorized(mats);
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    const double nrm = S.col(j).norm();
    if (nrm == 0.0)
      return 0.0;
    S.col(j) /= nrm;
  }
  if (S.cols() > S.rows())
    return 0.0;
  const Vector sv = Eigen::JacobiSVD<Matrix>(S).singularValues();
  return sv(sv.size() - 1);
}

std::vector<Eigen::Index> rankMultiset(const BasisResult& result)
{
  std::vector<Eigen::Index> ranks;
  for (const auto& e : result.elements)
    ranks.push_back(e.rank);
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

namespace {

constexpr double kIndependenceThreshold = 1e-8;

struct Attempt {
  BasisElement element;
  IterationTrace trace;
  std::size_t restarts = 0;
};

// One try at element l. Returns nullopt when every start degenerated or the
// refined element is dependent on the earlier ones.
std::optional<Attempt> attemptElement(const MatrixSubspace& sub, const SolverConfig& cfg, std::size_t l,
                                      std::size_t attempt, const Projector& Q, const std::vector<Matrix>& chosen,
                                      std::uint64_t svdBefore)
{
  Attempt out;
  std::uint64_t svd = svdBefore;
  const std::optional<Projector> restartProj = l > 0 ? std::optional<Projector>(Q) : std::nullopt;

  Matrix start;
  Eigen::Index r = 0;
  if (cfg.forceRanks) {
    Rng rng(deriveSeed(cfg.masterSeed, {l, attempt, 0}));
    start = randomElement(Q, rng);
    r = (*cfg.forceRanks)[l];
  } else {
    Phase1Config p1 = cfg.phase1;
    p1.restarttol = cfg.restarttol;
    std::optional<Phase1Result> best;
    std::size_t iteration = 0;
    for (std::size_t k = 0; k < cfg.numStarts; ++k) {
      Rng rng(deriveSeed(cfg.masterSeed, {l, attempt, k}));
      const Matrix X0 = randomElement(Q, rng);
      TraceContext ctx{l, iteration, svd, {}};
      try {
        Phase1Result p = estimateRank(sub, X0, p1, restartProj, rng, ctx);
        iteration += p.trace.rows.size();
        svd += p.trace.rows.size();
        out.trace.append(p.trace);
        out.restarts += p.restarts;
        if (!best || p.rankEstimate < best->rankEstimate)
          best = std::move(p);
      } catch (const DegenerateIterateError& e) {
        iteration += e.trace().rows.size();
        svd += e.trace().rows.size();
        out.trace.append(e.trace());
      }
    }
    if (!best)
      return std::nullopt;
    start = best->X;
    r = best->rankEstimate;
  }

  Phase2Config p2 = cfg.phase2;
  p2.r = r;
  p2.restarttol = cfg.restarttol;
  Rng rng(deriveSeed(cfg.masterSeed, {l, attempt, cfg.numStarts + 1}));
  TraceContext ctx{l, 0, svd, {}};
  Phase2Result p;
  try {
    p = refineToRank(sub, start, p2, restartProj, rng, ctx);
  } catch (const DegenerateIterateError&) {
    return std::nullopt;
  }
  out.trace.append(p.trace);
  out.restarts += p.restarts;

  std::vector<Matrix> all = chosen;
  all.push_back(p.X);
  if (!(independenceMeasure(all) > kIndependenceThreshold))
    return std::nullopt;

  out.element.X = p.X;
  out.element.rank = r;
  out.element.phase2Residual = p.residual;
  out.element.converged = p.converged;
  out.element.phase2Skipped = p.converged && p.iterations == 1;
  return out;
}

} // namespace

BasisResult solveLowRankBasis(const MatrixSubspace& sub, const SolverConfig& cfg, const TraceSink& sink)
{
  cfg.validate();
  const auto d = static_cast<std::size_t>(sub.dim());
  if (d == 0)
    throw std::invalid_argument("solveLowRankBasis: empty subspace");
  if (cfg.forceRanks) {
    if (cfg.forceRanks->size() != d)
      throw std::invalid_argument("solveLowRankBasis: forceRanks needs one rank per basis element");
    for (Eigen::Index r : *cfg.forceRanks)
      if (r < 1 || r > std::min(sub.rows(), sub.cols()))
        throw std::invalid_argument("solveLowRankBasis: forced rank out of range");
  }

  BasisResult result;
  std::vector<Matrix> chosen;
  std::uint64_t svd = 0;
  Projector Q = Projector::full(sub);

  for (std::size_t l = 0; l < d; ++l) {
    std::optional<Attempt> accepted;
    for (std::size_t attempt = 0; attempt <= cfg.maxElementRetries && !accepted; ++attempt)
      accepted = attemptElement(sub, cfg, l, attempt, Q, chosen, svd);
    if (!accepted) {
      std::ostringstream msg;
      msg << "solveLowRankBasis: element " << l << " still dependent or degenerate after "
          << cfg.maxElementRetries << " retries";
      throw SolverAbortError(msg.str());
    }
    svd += accepted->trace.rows.size();
    if (sink)
      for (const auto& row : accepted->trace.rows)
        sink(row);
    result.traces.push_back(std::move(accepted->trace));
    result.restartCount += accepted->restarts;
    result.totalRank += accepted->element.rank;
    chosen.push_back(accepted->element.X);
    result.elements.push_back(std::move(accepted->element));
    if (l + 1 < d)
      Q = complementProjector(sub, chosen);
  }

  result.subspaceAngleToInput = subspaceAngle(buildSubspace(chosen), sub);
  return result;
}

} // namespace lrb
