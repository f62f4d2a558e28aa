#include "lrb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace lrb::bench {

std::size_t threadCount()
{
  if (const char* env = std::getenv("LRB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct TrialOutcome {
  bool aborted = false;
  IterationTrace trace;
  double phase1Error = 0.0;
  bool converged = false;
  double angle = 0.0;
};

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string rankList(const std::vector<Eigen::Index>& r)
{
  std::string s = "(";
  for (std::size_t i = 0; i < r.size(); ++i)
    s += (i ? "," : "") + std::to_string(r[i]);
  return s + ")";
}

Vector unitVec(const Matrix& X)
{
  Vector v = kernels::vec(X);
  return v / v.norm();
}

} // namespace

SyntheticRowResult runSyntheticRow(const std::vector<Eigen::Index>& ranks, std::size_t trials, std::size_t numStarts,
                                   std::uint64_t seed, std::size_t threads, Eigen::Index m, Eigen::Index n)
{
  const std::function<TrialOutcome(std::size_t)> trial = [&](std::size_t i) {
    TrialOutcome out;
    SyntheticSpec spec{m, n, ranks, deriveSeed(seed, {i, 0}), false};
    const Instance inst = generateSynthetic(spec);
    SolverConfig cfg;
    cfg.numStarts = numStarts;
    cfg.masterSeed = deriveSeed(seed, {i, 1});
    try {
      const BasisResult res = solveLowRankBasis(inst.sub, cfg);
      out.trace = res.combinedTrace();
      out.phase1Error = summarize({out.trace}, inst.truth.ranks).avgPhase1Error;
      out.converged = res.allConverged();
      out.angle = res.subspaceAngleToInput;
    } catch (const SolverAbortError&) {
      out.aborted = true;
    }
    return out;
  };
  const auto outcomes = parallelMap(trials, threads, trial);

  SyntheticRowResult row;
  row.ranks = ranks;
  row.trials = trials;
  std::vector<IterationTrace> traces;
  for (const auto& o : outcomes) {
    if (o.aborted) {
      ++row.aborted;
      continue;
    }
    traces.push_back(o.trace);
    row.phase1Exact += o.phase1Error <= 1e-12 ? 1 : 0;
    row.fullyConverged += o.converged ? 1 : 0;
    row.maxSubspaceAngle = std::max(row.maxSubspaceAngle, o.angle);
  }
  if (!traces.empty())
    row.summary = summarize(traces);
  return row;
}

double tailRatio(const std::vector<double>& errors, double lo, double hi, std::size_t* windowLength)
{
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i] >= lo && errors[i] <= hi) {
      if (!first)
        first = i;
      last = i;
    }
  if (windowLength)
    *windowLength = first ? *last - *first : 0;
  if (!first || *last == *first || !(errors[*first] > 0.0))
    return 0.0;
  return std::pow(errors[*last] / errors[*first], 1.0 / static_cast<double>(*last - *first));
}

ConvFactorRun measureConvergenceFactor(Eigen::Index r, Eigen::Index n, std::uint64_t seed)
{
  const Instance inst = generateSynthetic({n, n, std::vector<Eigen::Index>(5, r), seed, false});
  Rng rng(deriveSeed(seed, {1}));
  const Matrix X0 = randomElement(Projector::full(inst.sub), rng);
  Phase2Config cfg;
  cfg.r = r;
  const Phase2Result p2 = refineToRank(inst.sub, X0, cfg, std::nullopt, rng);

  ConvFactorRun run;
  run.r = r;
  run.n = n;
  run.converged = p2.converged;
  run.phase2Iterations = p2.iterations;
  run.measured = tailRatio(p2.truncationErrors, 1e-12, 1e-3, &run.windowLength);
  run.predicted = std::sqrt(static_cast<double>(r) / static_cast<double>(n));
  return run;
}

std::vector<double> groupAngles(const std::vector<Matrix>& recovered, const std::vector<Matrix>& truth,
                                const std::vector<Eigen::Index>& groups, std::vector<Eigen::Index>* chosen)
{
  if (truth.size() != groups.size())
    throw std::invalid_argument("groupAngles: one group id per truth element needed");
  std::vector<Eigen::Index> ids = groups;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<Matrix> spans;
  for (Eigen::Index g : ids) {
    std::vector<Matrix> members;
    for (std::size_t j = 0; j < truth.size(); ++j)
      if (groups[j] == g)
        members.push_back(truth[j]);
    spans.push_back(kernels::orthonormalColumns(stackVectorized(members)));
  }

  std::vector<double> angles;
  if (chosen)
    chosen->clear();
  for (const auto& X : recovered) {
    const Vector x = unitVec(X);
    double best = 10.0;
    Eigen::Index bestGroup = -1;
    for (std::size_t g = 0; g < spans.size(); ++g) {
      const double s = (x - spans[g] * (spans[g].transpose() * x)).norm();
      const double a = std::asin(std::min(1.0, s));
      if (a < best) {
        best = a;
        bestGroup = ids[g];
      }
    }
    angles.push_back(best);
    if (chosen)
      chosen->push_back(bestGroup);
  }
  return angles;
}

double maxElementAngle(const std::vector<Matrix>& recovered, const std::vector<Matrix>& truth)
{
  if (recovered.size() != truth.size() || truth.empty())
    throw std::invalid_argument("maxElementAngle: sizes differ");
  const Matrix R = stackVectorized(truth);
  const Matrix E = stackVectorized(recovered);
  const auto perm = matchColumns(R, E);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    const Vector t = R.col(j) / R.col(j).norm();
    const Vector e = E.col(perm[j]) / E.col(perm[j]).norm();
    const double s = (e - t * t.dot(e)).norm();
    worst = std::max(worst, std::asin(std::min(1.0, s)));
  }
  return worst;
}

CirculantResult runCirculant(Eigen::Index nSide, Eigen::Index clusterSize, std::uint64_t seed)
{
  const CirculantInstance inst = circulantEigenproblem(nSide, clusterSize, 1e-10, seed);
  SolverConfig cfg;
  cfg.masterSeed = deriveSeed(seed, {1});
  cfg.numStarts = 5;
  const BasisResult res = solveLowRankBasis(inst.sub, cfg);

  CirculantResult out;
  out.nSide = nSide;
  out.clusterSize = clusterSize;
  out.allConverged = res.allConverged();
  std::vector<Matrix> mats;
  for (const auto& e : res.elements) {
    out.recoveredRanks.push_back(e.rank);
    const Vector sv = kernels::svd(e.X).singularValues;
    out.numericalRanks.push_back((sv.array() > 1e-10 * sv(0)).count());
    mats.push_back(e.X);
  }
  out.groupAngles = groupAngles(mats, inst.truth.basis, inst.frequencies, &out.groupFrequency);
  out.maxGroupAngle = *std::max_element(out.groupAngles.begin(), out.groupAngles.end());
  const Eigen::Index rhat = *std::max_element(inst.truth.ranks.begin(), inst.truth.ranks.end());
  out.storage = circulantStorage(nSide, clusterSize, rhat);
  return out;
}

CpCompareRow runCpCompare(Eigen::Index m, Eigen::Index n, Eigen::Index d, std::uint64_t seed, std::size_t numStarts)
{
  const Instance inst =
    generateSynthetic({m, n, std::vector<Eigen::Index>(static_cast<std::size_t>(d), 1), seed, true});
  CpCompareRow row;
  row.m = m;
  row.n = n;
  row.d = d;
  row.leurgansRejected = d > std::min(m, n);
  try {
    CpReport rep;
    const BasisResult cp = rankOneBasisViaCp(inst.sub, deriveSeed(seed, {2}), &rep);
    std::vector<Matrix> mats;
    for (const auto& e : cp.elements)
      mats.push_back(e.X);
    row.cpSucceeded = true;
    row.cpUsedAls = rep.usedAls;
    row.cpElementAngle = maxElementAngle(mats, inst.truth.basis);
    row.cpSubspaceAngle = cp.subspaceAngleToInput;
  } catch (const CpError& e) {
    row.cpFailure = e.what();
  }

  SolverConfig cfg;
  cfg.masterSeed = deriveSeed(seed, {3});
  cfg.numStarts = numStarts;
  const BasisResult g = solveLowRankBasis(inst.sub, cfg);
  std::vector<Matrix> mats;
  for (const auto& e : g.elements)
    mats.push_back(e.X);
  row.greedyElementAngle = maxElementAngle(mats, inst.truth.basis);
  row.greedySubspaceAngle = g.subspaceAngleToInput;
  row.greedyTotalRank = g.totalRank;
  row.greedyConverged = g.allConverged();
  return row;
}

const std::vector<std::string>& suiteNames()
{
  static const std::vector<std::string> names{"table1", "table2", "convfactor", "circulant", "cp-compare"};
  return names;
}

namespace {

const std::vector<std::vector<Eigen::Index>> kTableRanks{
  {1, 1, 1, 1, 1}, {2, 2, 2, 2, 2}, {1, 2, 3, 4, 5}, {5, 5, 5, 10, 10}, {5, 5, 10, 10, 15}};

std::string syntheticTable(std::size_t trials, std::size_t numStarts, std::uint64_t seed, std::size_t threads)
{
  std::ostringstream os;
  os << "# m = n = 20, d = 5, " << trials << " trials, " << numStarts << " start(s) per element\n";
  os << "exact ranks\tav. sum(ranks)\tav. Phase I err (iter)\tav. Phase II err (iter)\tPhase I exact\tconverged\taborted\n";
  for (std::size_t k = 0; k < kTableRanks.size(); ++k) {
    const auto row = runSyntheticRow(kTableRanks[k], trials, numStarts, deriveSeed(seed, {k}), threads);
    const auto& s = row.summary;
    os << rankList(row.ranks) << '\t' << fmt("%.2f", s.avgSumRanks) << '\t' << fmt("%.2e", s.avgPhase1Error) << " ("
       << fmt("%.1f", s.avgPhase1Iterations) << ")\t" << fmt("%.2e", s.avgPhase2Error) << " ("
       << fmt("%.1f", s.avgPhase2Iterations) << ")\t" << row.phase1Exact << '/' << row.trials << '\t'
       << row.fullyConverged << '/' << row.trials << '\t' << row.aborted << '\n';
  }
  return os.str();
}

std::string convFactorTable(std::size_t trials, std::uint64_t seed, std::size_t threads)
{
  std::ostringstream os;
  os << "r\tn\trun\tconverged\tPhase II SVDs\tmeasured\tsqrt(r/n)\tratio\n";
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> cases{{2, 10}, {10, 100}};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto [r, n] = cases[c];
    const std::function<ConvFactorRun(std::size_t)> f = [&, r = r, n = n](std::size_t i) {
      return measureConvergenceFactor(r, n, deriveSeed(seed, {c, i}));
    };
    const auto runs = parallelMap(trials, threads, f);
    std::size_t within = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& run = runs[i];
      const double ratio = run.measured / run.predicted;
      within += (ratio >= 0.5 && ratio <= 2.0) ? 1 : 0;
      os << r << '\t' << n << '\t' << i << '\t' << (run.converged ? "yes" : "no") << '\t'
         << run.phase2Iterations << '\t' << fmt("%.4f", run.measured) << '\t' << fmt("%.4f", run.predicted) << '\t'
         << fmt("%.3f", ratio) << '\n';
    }
    os << "# (r, n) = (" << r << ", " << n << "): " << within << '/' << runs.size()
       << " runs within a factor 2 of sqrt(r/n)\n";
  }
  return os.str();
}

std::string circulantTable(std::size_t trials, std::uint64_t seed, std::size_t threads)
{
  std::ostringstream os;
  os << "run\tranks\tnumerical ranks\tfrequencies\tmax angle\tfactored entries\tdense entries\n";
  const std::function<CirculantResult(std::size_t)> f = [&](std::size_t i) {
    return runCirculant(20, 5, deriveSeed(seed, {i}));
  };
  const auto runs = parallelMap(trials, threads, f);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    os << i << '\t' << rankList(r.recoveredRanks) << '\t' << rankList(r.numericalRanks) << '\t'
       << rankList(r.groupFrequency) << '\t' << fmt("%.2e", r.maxGroupAngle) << '\t' << r.storage.factored << '\t'
       << r.storage.dense << '\n';
  }
  return os.str();
}

std::string cpCompareTable(std::size_t trials, std::uint64_t seed, std::size_t threads)
{
  std::ostringstream os;
  os << "# rank-one bases in R^{10 x 10}, greedy with 5 starts; angles are the largest element-wise angle to the ground truth\n";
  os << "d\tCP ok\tCP via ALS\tCP max angle\tgreedy max angle\tgreedy total rank\n";
  const std::vector<Eigen::Index> dims{2, 4, 6, 8, 10, 12, 15, 20};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const Eigen::Index d = dims[k];
    const std::function<CpCompareRow(std::size_t)> f = [&, d](std::size_t i) {
      return runCpCompare(10, 10, d, deriveSeed(seed, {k, i}));
    };
    const auto rows = parallelMap(trials, threads, f);
    std::size_t ok = 0, als = 0;
    double cpWorst = 0.0, gWorst = 0.0, rankSum = 0.0;
    for (const auto& r : rows) {
      if (r.cpSucceeded) {
        ++ok;
        cpWorst = std::max(cpWorst, r.cpElementAngle);
      }
      als += r.cpUsedAls ? 1 : 0;
      gWorst = std::max(gWorst, r.greedyElementAngle);
      rankSum += static_cast<double>(r.greedyTotalRank);
    }
    os << d << '\t' << ok << '/' << rows.size() << '\t' << als << '\t' << (ok ? fmt("%.2e", cpWorst) : "-") << '\t'
       << fmt("%.2e", gWorst) << '\t' << fmt("%.2f", rankSum / static_cast<double>(rows.size())) << '\n';
  }
  return os.str();
}

} // namespace

std::string runSuite(const std::string& suite, std::size_t trials, std::uint64_t seed, std::size_t threads)
{
  if (trials < 1)
    throw std::invalid_argument("bench: trials must be at least 1");
  if (suite == "table1")
    return syntheticTable(trials, 1, seed, threads);
  if (suite == "table2")
    return syntheticTable(trials, 5, seed, threads);
  if (suite == "convfactor")
    return convFactorTable(trials, seed, threads);
  if (suite == "circulant")
    return circulantTable(trials, seed, threads);
  if (suite == "cp-compare")
    return cpCompareTable(trials, seed, threads);
  throw std::invalid_argument("bench: unknown suite '" + suite + "'");
}

} // namespace lrb::bench
