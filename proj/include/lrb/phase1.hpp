#pragma once

#include "lrb/subspace.hpp"
#include "lrb/trace.hpp"

#include <optional>

namespace lrb {

struct Phase1Config {
  double delta = 0.1;
  double tauTol = 1e-3;
  std::size_t maxit = 1000;
  std::size_t changeit = 50;
  std::size_t restartit = 50;
  double restarttol = 1e-3;
  /// Drop singular values <= tauTol and renormalize before shrinking.
  bool removeNoise = true;

  void validate() const;
};

struct Phase1Result {
  Matrix X;  ///< in the subspace, unit Frobenius norm
  Matrix Y;  ///< last shrunk iterate, rank == rankEstimate
  Eigen::Index rankEstimate = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  IterationTrace trace;
};

/// Thrown when an iterate collapses (all singular values below tauTol, or a
/// zero projection) so that the next step is undefined.
class DegenerateIterateError : public std::runtime_error {
public:
  DegenerateIterateError(const std::string& what, IterationTrace trace)
    : std::runtime_error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

private:
  IterationTrace trace_;
};

/// Adaptive soft thresholding alternated with projection onto the subspace.
///
/// Starting from a unit-norm X0 in the subspace, each step shrinks the singular
/// values by tau = delta / sqrt(s), where s counts singular values above tauTol,
/// projects the result back and renormalizes. The rank estimate starts at
/// min(m, n) and only decreases; the run stops once it has not changed for
/// changeit steps. When restartProj is given, every restartit steps the iterate
/// is checked against it (see restartCheck) and replaced if nearly dependent.
Phase1Result estimateRank(const MatrixSubspace& sub, const Matrix& X0, const Phase1Config& cfg,
                          const std::optional<Projector>& restartProj, Rng& rng, const TraceContext& ctx = {});

} // namespace lrb
