#pragma once

#include "lrb/cp.hpp"
#include "lrb/greedy.hpp"
#include "lrb/problems.hpp"
#include "lrb/trace.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lrb::bench {

/// Worker count: LRB_THREADS when set to a positive integer, else the hardware count.
std::size_t threadCount();

/// Runs f(0), ..., f(count - 1) on up to `threads` workers; results come back in index order.
template <class R>
std::vector<R> parallelMap(std::size_t count, std::size_t threads, const std::function<R(std::size_t)>& f);

/// One row of the synthetic experiment (m = n = 20, d = 5 unless given otherwise).
struct SyntheticRowResult {
  std::vector<Eigen::Index> ranks;
  TraceSummary summary;             ///< errors against the estimated ranks
  std::size_t trials = 0;
  std::size_t phase1Exact = 0;      ///< trials with Phase I error <= 1e-12 against the true ranks
  std::size_t fullyConverged = 0;   ///< trials in which every element converged
  std::size_t aborted = 0;          ///< trials that threw
  double maxSubspaceAngle = 0.0;
};

SyntheticRowResult runSyntheticRow(const std::vector<Eigen::Index>& ranks, std::size_t trials, std::size_t numStarts,
                                   std::uint64_t seed, std::size_t threads, Eigen::Index m = 20, Eigen::Index n = 20);

/// Alternating projections at rank r from a random start, on an instance with
/// d = 5 elements of rank r in R^{n x n}.
struct ConvFactorRun {
  Eigen::Index r = 0;
  Eigen::Index n = 0;
  bool converged = false;
  std::size_t phase2Iterations = 0;
  double measured = 0.0;   ///< geometric mean of truncation-error ratios in the tail window
  double predicted = 0.0;  ///< sqrt(r / n)
  std::size_t windowLength = 0;
};

ConvFactorRun measureConvergenceFactor(Eigen::Index r, Eigen::Index n, std::uint64_t seed);

/// Geometric mean of consecutive ratios of errors lying in [lo, hi]; 0 if fewer than two.
double tailRatio(const std::vector<double>& errors, double lo = 1e-12, double hi = 1e-3,
                 std::size_t* windowLength = nullptr);

struct CirculantResult {
  Eigen::Index nSide = 0;
  Eigen::Index clusterSize = 0;
  std::vector<Eigen::Index> recoveredRanks;  ///< solver ranks in recovery order
  std::vector<Eigen::Index> numericalRanks;  ///< sigma_i > 1e-10 sigma_1 of each recovered element
  std::vector<double> groupAngles;           ///< angle of each element to its closest frequency group
  std::vector<Eigen::Index> groupFrequency;
  double maxGroupAngle = 0.0;
  bool allConverged = false;
  StorageCount storage;
};

CirculantResult runCirculant(Eigen::Index nSide, Eigen::Index clusterSize, std::uint64_t seed);

/// Angle of each recovered element to the span of its best-matching truth element set,
/// truth elements grouped by `groups` (elements with equal group id form one span).
std::vector<double> groupAngles(const std::vector<Matrix>& recovered, const std::vector<Matrix>& truth,
                                const std::vector<Eigen::Index>& groups, std::vector<Eigen::Index>* chosen = nullptr);

/// Largest angle between a recovered element and the truth element matched to it
/// (greedy matching by |cosine|). Sizes must agree.
double maxElementAngle(const std::vector<Matrix>& recovered, const std::vector<Matrix>& truth);

struct CpCompareRow {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  bool cpSucceeded = false;
  bool cpUsedAls = false;
  std::string cpFailure;
  double cpElementAngle = 0.0;    ///< vs ground truth; valid when cpSucceeded
  double cpSubspaceAngle = 0.0;
  bool leurgansRejected = false;  ///< precondition d <= min(m, n) failed
  double greedyElementAngle = 0.0;
  double greedySubspaceAngle = 0.0;
  Eigen::Index greedyTotalRank = 0;
  bool greedyConverged = false;
};

/// Random rank-one basis of dimension d in R^{m x n}, solved both ways.
CpCompareRow runCpCompare(Eigen::Index m, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                          std::size_t numStarts = 5);

/// Formatted report of a named suite: table1, table2, convfactor, circulant, cp-compare.
/// Throws std::invalid_argument for an unknown suite.
std::string runSuite(const std::string& suite, std::size_t trials, std::uint64_t seed, std::size_t threads);

const std::vector<std::string>& suiteNames();

} // namespace lrb::bench

#include "lrb/bench_impl.hpp"
