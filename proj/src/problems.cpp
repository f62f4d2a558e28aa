#include "lrb/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lrb {

namespace {

Matrix thinQ(const Matrix& G)
{
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
}

} // namespace

Instance generateSynthetic(const SyntheticSpec& spec)
{
  if (spec.m < 1 || spec.n < 1)
    throw std::invalid_argument("generateSynthetic: dimensions must be positive");
  if (spec.ranks.empty())
    throw std::invalid_argument("generateSynthetic: no ranks given");
  const auto d = static_cast<Eigen::Index>(spec.ranks.size());
  if (d > spec.m * spec.n)
    throw std::invalid_argument("generateSynthetic: d exceeds mn");
  for (Eigen::Index r : spec.ranks)
    if (r < 1 || r > std::min(spec.m, spec.n))
      throw std::invalid_argument("generateSynthetic: rank " + std::to_string(r) + " out of range");

  constexpr int kAttempts = 3;
  std::string lastError;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
    Rng rng(seed);
    GroundTruth truth;
    truth.ranks = spec.ranks;
    for (Eigen::Index r : spec.ranks) {
      const Matrix U = thinQ(gaussianMatrix(spec.m, r, rng));
      const Matrix V = thinQ(gaussianMatrix(spec.n, r, rng));
      truth.basis.push_back(U * V.transpose());
    }
    std::vector<Matrix> input = truth.basis;
    if (spec.mix) {
      const Matrix T = gaussianMatrix(d, d, rng);
      for (Eigen::Index j = 0; j < d; ++j) {
        input[j].setZero();
        for (Eigen::Index i = 0; i < d; ++i)
          input[j] += T(i, j) * truth.basis[i];
      }
    }
    try {
      // Both the ground truth and the solver input have to be independent.
      buildSubspace(truth.basis);
      return Instance{buildSubspace(input), std::move(truth), seed};
    } catch (const RankDeficientError& e) {
      lastError = e.what();
    }
  }
  throw std::runtime_error("generateSynthetic: dependent basis after 3 attempts: " + lastError);
}

double normalizedNuclearNorm(const Matrix& X) { return kernels::nuclearNorm(X) / X.norm(); }

double Counterexample::predictedSpanningRatio() const
{
  return (1.0 + 2.0 * std::sqrt(epsilon)) / std::sqrt(1.0 + 2.0 * epsilon);
}

double Counterexample::predictedXRatio() const
{
  return (1.0 + 4.0 * epsilon) / std::sqrt(1.0 + 4.0 * epsilon * epsilon);
}

Counterexample counterexampleSubspace(double epsilon)
{
  if (!(epsilon > 0.0 && epsilon < 0.01))
    throw std::invalid_argument("counterexampleSubspace: epsilon must lie in (0, 0.01)");
  const double se = std::sqrt(epsilon);
  Vector d1(7), d2(7), d3(7);
  d1 << 1, -se, -se, 0, 0, 0, 0;
  d2 << 0, 1, 0, se, se, 0, 0;
  d3 << 0, 0, 1, 0, 0, se, se;
  std::vector<Matrix> M{d1.asDiagonal(), d2.asDiagonal(), d3.asDiagonal()};
  Matrix X = M[0] + se * (M[1] + M[2]);
  MatrixSubspace sub = buildSubspace(M);
  return Counterexample{std::move(M), std::move(X), epsilon, std::move(sub)};
}

Eigen::Index realDftFrequency(Eigen::Index j) { return (j + 1) / 2; }

Matrix realDftBasis(Eigen::Index N)
{
  if (N < 1)
    throw std::invalid_argument("realDftBasis: N must be positive");
  Matrix F(N, N);
  const double twoPi = 2.0 * std::numbers::pi;
  for (Eigen::Index j = 0; j < N; ++j) {
    const Eigen::Index k = realDftFrequency(j);
    for (Eigen::Index t = 0; t < N; ++t) {
      const double angle = twoPi * static_cast<double>((k * t) % N) / static_cast<double>(N);
      if (j == 0)
        F(t, j) = 1.0;
      else if (j % 2 == 1)
        F(t, j) = std::cos(angle);
      else
        F(t, j) = std::sin(angle);
    }
  }
  // For even N the last sine column vanishes; the Nyquist column takes its place.
  if (N % 2 == 0)
    for (Eigen::Index t = 0; t < N; ++t)
      F(t, N - 1) = (t % 2 == 0) ? 1.0 : -1.0;
  for (Eigen::Index j = 0; j < N; ++j)
    F.col(j).normalize();
  return F;
}

CirculantInstance circulantEigenproblem(Eigen::Index nSide, Eigen::Index clusterSize, double clusterSpread,
                                        std::uint64_t seed)
{
  if (nSide < 2)
    throw std::invalid_argument("circulantEigenproblem: nSide must be at least 2");
  if (clusterSize < 1 || clusterSize > nSide)
    throw std::invalid_argument("circulantEigenproblem: clusterSize must lie in [1, nSide]");
  const Eigen::Index N = nSide * nSide;
  const Matrix F = realDftBasis(N);

  CirculantInstance inst{MatrixSubspace(nSide, nSide, Matrix(N, 0)), {}, {}, {}, nSide};
  for (Eigen::Index j = 0; j < clusterSize; ++j) {
    inst.truth.basis.push_back(kernels::mat(F.col(j), nSide, nSide));
    inst.frequencies.push_back(realDftFrequency(j));
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-clusterSpread, clusterSpread);
  for (Eigen::Index j = 0; j < clusterSize; ++j)
    inst.eigenvalues.push_back(1.0 + unif(rng));

  // Haar orthogonal matrix: Q factor of a Gaussian matrix with sign-corrected diagonal.
  const Matrix G = gaussianMatrix(clusterSize, clusterSize, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < clusterSize; ++j)
    if (R(j, j) < 0.0)
      Q.col(j) = -Q.col(j);

  const Matrix mixed = F.leftCols(clusterSize) * Q;
  std::vector<Matrix> input;
  for (Eigen::Index j = 0; j < clusterSize; ++j)
    input.push_back(kernels::mat(mixed.col(j), nSide, nSide));
  inst.sub = buildSubspace(input);
  for (const auto& B : inst.truth.basis) {
    const Vector sv = kernels::svd(B).singularValues;
    inst.truth.ranks.push_back((sv.array() > 1e-12 * sv(0)).count());
  }
  return inst;
}

StorageCount circulantStorage(Eigen::Index nSide, Eigen::Index d, Eigen::Index rhat)
{
  return StorageCount{d * rhat * 2 * nSide + d * d, d * nSide * nSide};
}

CompressionRatios compressionRatio(Eigen::Index m, Eigen::Index n, Eigen::Index r, Eigen::Index rhat)
{
  if (m < 1 || n < 1 || r < 0 || rhat < 0)
    throw std::invalid_argument("compressionRatio: invalid sizes");
  const auto s = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(m))));
  if (s * s != m) {
    std::ostringstream msg;
    msg << "compressionRatio: m = " << m << " is not a perfect square";
    throw std::invalid_argument(msg.str());
  }
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  CompressionRatios out;
  out.classic = static_cast<double>((m + n) * r) / mn;
  out.nested = static_cast<double>(4 * s * r * rhat + r * r) / mn;
  return out;
}

double asymptoticNestedRatio(double delta, double deltaHat) { return 4.0 * delta * deltaHat + delta * delta; }

double asymptoticClassicRatio(double delta) { return 2.0 * delta; }

} // namespace lrb
