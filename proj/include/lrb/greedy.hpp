#pragma once

#include "lrb/phase1.hpp"
#include "lrb/phase2.hpp"
#include "lrb/restart.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lrb {

struct SolverConfig {
  Phase1Config phase1;
  Phase2Config phase2;  ///< r is set per element
  double restarttol = 1e-3;
  std::size_t numStarts = 1;
  std::uint64_t masterSeed = 0;
  /// Skip rank estimation and refine element l to forceRanks[l].
  std::optional<std::vector<Eigen::Index>> forceRanks;
  /// Outer retries of one element when its result is dependent on the previous ones.
  std::size_t maxElementRetries = 5;

  void validate() const;
};

struct BasisElement {
  Matrix X;
  Eigen::Index rank = 0;
  double phase2Residual = 0.0;
  bool converged = false;
  bool phase2Skipped = false;
};

struct BasisResult {
  std::vector<BasisElement> elements;
  Eigen::Index totalRank = 0;
  double subspaceAngleToInput = 0.0;
  /// One trace per element, rows in (phase, iteration) order.
  std::vector<IterationTrace> traces;
  std::size_t restartCount = 0;

  bool allConverged() const;
  /// All element traces concatenated.
  IterationTrace combinedTrace() const;
};

/// Thrown when an element keeps coming out dependent on the earlier ones.
class SolverAbortError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Greedy low-rank basis: for each element, rank estimation from a random start in
/// the complement of the elements found so far, then alternating projections at that
/// rank (skipped when the estimate is already exact), then a complement update.
/// sink, when given, receives every trace row of accepted element attempts in order.
BasisResult solveLowRankBasis(const MatrixSubspace& sub, const SolverConfig& cfg, const TraceSink& sink = {});

std::vector<Eigen::Index> rankMultiset(const BasisResult& result);

/// sigma_min of [vec(X_1) / ||X_1||, ..., vec(X_k) / ||X_k||].
double independenceMeasure(const std::vector<Matrix>& mats);

} // namespace lrb
