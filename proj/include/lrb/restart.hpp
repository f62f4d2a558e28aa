#pragma once

#include "lrb/subspace.hpp"

namespace lrb {

/// If ||Q(X)||_F < restarttol, X is nearly dependent on the elements already
/// found; return a fresh normalized random element of range(Q). Otherwise
/// return X unchanged. fired reports which branch was taken.
Matrix restartCheck(const Projector& Q, const Matrix& X, double restarttol, Rng& rng, bool* fired = nullptr);

} // namespace lrb
