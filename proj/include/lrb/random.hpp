#pragma once

#include "lrb/kernels.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lrb {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; mixes a master seed with stream indices.
inline std::uint64_t mixSeed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> streams)
{
  std::uint64_t s = mixSeed(master);
  for (std::uint64_t v : streams)
    s = mixSeed(s ^ mixSeed(v + 0x632be59bd9b4e019ULL));
  return s;
}

inline Matrix gaussianMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(rows, cols);
  // Fill column by column so the draw order is fixed by the storage order.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      G(i, j) = normal(rng);
  return G;
}

} // namespace lrb
