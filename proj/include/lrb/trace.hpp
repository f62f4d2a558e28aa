#pragma once

#include "lrb/kernels.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lrb {

/// One SVD of the current iterate X (always taken after projection onto the
/// subspace), with the state of the iteration after that step.
struct TraceRow {
  std::size_t element = 0;  ///< greedy index l (0-based)
  int phase = 1;            ///< 1 = rank estimation, 2 = alternating projections
  std::size_t iteration = 0;
  Vector singularValues;
  Eigen::Index rankEstimate = 0;
  double residual = 0.0;    ///< phase 1: ||X - S_tau(X)||_F, phase 2: ||X - T_r(X)||_F
  bool restartFired = false;
  std::uint64_t svdCount = 0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  void append(const IterationTrace& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

using TraceSink = std::function<void(const TraceRow&)>;

/// Where a phase run sits inside a larger solve.
struct TraceContext {
  std::size_t element = 0;
  std::size_t firstIteration = 0;
  std::uint64_t svdCountBefore = 0;
  TraceSink sink;
};

/// Tab-separated row; singular values comma-joined with 17 significant digits.
std::string formatTraceRow(const TraceRow& row);
TraceRow parseTraceRow(const std::string& line);

void writeTrace(std::ostream& os, const IterationTrace& trace);
IterationTrace readTrace(std::istream& is);

/// Checks the ordering invariants; returns an empty string when they hold.
std::string validateTrace(const IterationTrace& trace);

/// Averages of the four synthetic-experiment statistics over a set of runs.
struct TraceSummary {
  std::size_t runs = 0;
  double avgSumRanks = 0.0;
  double avgPhase1Error = 0.0;   ///< sqrt(sum_l ||X_l - T_{r_l}(X_l)||^2) after rank estimation
  double avgPhase2Error = 0.0;   ///< same quantity for the final iterates
  double avgPhase1Iterations = 0.0;  ///< SVDs per element, all starts included
  double avgPhase2Iterations = 0.0;  ///< projection steps per element (0 when already rank r)
  bool againstGroundTruth = false;  ///< false: errors use the estimated ranks
};

/// Each entry of runs holds the complete trace of one solve. With groundTruthRanks
/// the error ranks come from matching the sorted estimated ranks to the sorted
/// true ranks; otherwise the estimated ranks are used.
TraceSummary summarize(const std::vector<IterationTrace>& runs,
                       const std::optional<std::vector<Eigen::Index>>& groundTruthRanks = std::nullopt);

} // namespace lrb
