#include "lrb/bench.hpp"
#include "lrb/cp.hpp"
#include "lrb/greedy.hpp"
#include "lrb/io.hpp"
#include "lrb/problems.hpp"
#include "lrb/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using lrb::Matrix;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

lrb::MatrixSubspace loadSubspace(const std::string& path)
{
  const auto set = lrb::io::readMatrixSetFile(path);
  if (set.kind != "subspace" && set.kind != "tensor")
    throw lrb::io::ParseError(path + ": expected a subspace or tensor file, found '" + set.kind + "'", 0);
  return lrb::buildSubspace(set.mats);
}

void emit(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::vector<Eigen::Index> parseRankList(const std::string& s)
{
  std::vector<Eigen::Index> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty() || v < 1)
      throw std::invalid_argument("invalid rank '" + tok + "' in list '" + s + "'");
    out.push_back(static_cast<Eigen::Index>(v));
  }
  if (out.empty())
    throw std::invalid_argument("empty rank list");
  return out;
}

json elementsJson(const lrb::BasisResult& res)
{
  json els = json::array();
  for (const auto& e : res.elements)
    els.push_back({{"rank", e.rank},
                   {"phase2Residual", e.phase2Residual},
                   {"converged", e.converged},
                   {"phase2Skipped", e.phase2Skipped}});
  return els;
}

struct BasisOptions {
  std::string input;
  std::string out;
  std::string summary;
  std::string trace;
  std::string truth;
  std::string forceRanks;
  lrb::SolverConfig cfg;
};

int cmdBasis(const BasisOptions& o)
{
  const auto sub = loadSubspace(o.input);
  lrb::SolverConfig cfg = o.cfg;
  if (!o.forceRanks.empty())
    cfg.forceRanks = parseRankList(o.forceRanks);

  std::unique_ptr<std::ofstream> traceOut;
  lrb::TraceSink sink;
  if (!o.trace.empty()) {
    traceOut = std::make_unique<std::ofstream>(o.trace);
    if (!*traceOut)
      throw std::runtime_error("cannot write '" + o.trace + "'");
    sink = [&](const lrb::TraceRow& row) { *traceOut << lrb::formatTraceRow(row) << '\n'; };
  }

  const lrb::BasisResult res = lrb::solveLowRankBasis(sub, cfg, sink);
  if (traceOut)
    traceOut->flush();

  std::optional<std::vector<Eigen::Index>> truthRanks;
  if (!o.truth.empty())
    truthRanks = lrb::io::readMatrixSetFile(o.truth).ranks;
  const auto stats = lrb::summarize({res.combinedTrace()}, truthRanks);

  if (!o.out.empty()) {
    std::vector<Matrix> mats;
    for (const auto& e : res.elements)
      mats.push_back(e.X);
    lrb::io::writeMatrixSetFile(o.out, lrb::io::subspaceSet(mats));
  }

  const bool full = res.allConverged();
  json j{{"status", full ? "converged" : "partial"},
         {"totalRank", res.totalRank},
         {"ranks", lrb::rankMultiset(res)},
         {"elements", elementsJson(res)},
         {"restartCount", res.restartCount},
         {"subspaceAngleToInput", res.subspaceAngleToInput},
         {"phase1Error", stats.avgPhase1Error},
         {"phase2Error", stats.avgPhase2Error},
         {"phase1Iterations", stats.avgPhase1Iterations},
         {"phase2Iterations", stats.avgPhase2Iterations},
         {"errorsAgainstGroundTruth", stats.againstGroundTruth}};
  emit(o.summary, j.dump(2) + "\n");
  return full ? kExitOk : kExitPartial;
}

int cmdRankEstimate(const std::string& input, const lrb::Phase1Config& p1, std::size_t starts, std::uint64_t seed,
                    bool certify, const std::string& summary)
{
  const auto sub = loadSubspace(input);
  const lrb::Projector P = lrb::Projector::full(sub);
  json runs = json::array();
  for (std::size_t k = 0; k < starts; ++k) {
    lrb::Rng rng(lrb::deriveSeed(seed, {k}));
    const Matrix X0 = lrb::randomElement(P, rng);
    json run{{"start", k}};
    try {
      const auto r = lrb::estimateRank(sub, X0, p1, std::nullopt, rng);
      run["rank"] = r.rankEstimate;
      run["svds"] = r.iterations;
      run["truncationError"] = lrb::kernels::truncationError(lrb::kernels::svd(r.X).singularValues, r.rankEstimate);
      if (certify) {
        lrb::Phase2Config p2;
        p2.r = r.rankEstimate;
        const auto c = lrb::refineToRank(sub, r.X, p2, std::nullopt, rng);
        run["certified"] = c.converged;
        run["certifyResidual"] = c.residual;
      }
    } catch (const lrb::DegenerateIterateError& e) {
      run["error"] = e.what();
    }
    runs.push_back(run);
  }
  emit(summary, json{{"starts", runs}}.dump(2) + "\n");
  return kExitOk;
}

int cmdCpRankOne(const std::string& input, const std::string& out, std::uint64_t seed, const std::string& summary)
{
  const auto sub = loadSubspace(input);
  lrb::CpReport rep;
  const auto res = lrb::rankOneBasisViaCp(sub, seed, &rep);
  if (!out.empty()) {
    std::vector<Matrix> mats;
    for (const auto& e : res.elements)
      mats.push_back(e.X);
    lrb::io::writeMatrixSetFile(out, lrb::io::subspaceSet(mats));
  }
  json j{{"method", rep.usedAls ? "als" : "leurgans"},
         {"residual", rep.residual},
         {"totalRank", res.totalRank},
         {"subspaceAngleToInput", res.subspaceAngleToInput}};
  if (rep.usedAls)
    j["leurgansFailure"] = rep.leurgansFailure;
  emit(summary, j.dump(2) + "\n");
  return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Low-rank bases of matrix subspaces"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a problem instance");
  gen->require_subcommand(1);
  std::string genOut, genTruth;
  std::uint64_t genSeed = 0;

  auto* synth = gen->add_subcommand("synthetic", "Random basis with prescribed ranks");
  Eigen::Index sm = 20, sn = 20;
  std::string sranks = "1,2,3,4,5";
  bool noMix = false;
  synth->add_option("--m", sm, "rows")->check(CLI::PositiveNumber);
  synth->add_option("--n", sn, "columns")->check(CLI::PositiveNumber);
  synth->add_option("--ranks", sranks, "comma-separated ranks");
  synth->add_flag("--no-mix", noMix, "hand out the ground-truth basis itself");

  auto* counter = gen->add_subcommand("counterexample", "7x7 diagonal nuclear-norm counterexample");
  double epsilon = 1e-4;
  counter->add_option("--epsilon", epsilon, "epsilon in (0, 0.01)");

  auto* circ = gen->add_subcommand("circulant", "Mixed eigenvectors of a clustered circulant eigenvalue");
  Eigen::Index nSide = 20, cluster = 5;
  double spread = 1e-10;
  circ->add_option("--n-side", nSide, "matrix side; the circulant has size n-side^2")->check(CLI::PositiveNumber);
  circ->add_option("--cluster", cluster, "cluster size")->check(CLI::PositiveNumber);
  circ->add_option("--spread", spread, "eigenvalue spread of the cluster");

  for (auto* sc : {synth, counter, circ}) {
    sc->add_option("--out", genOut, "subspace file")->required();
    if (sc != counter) {
      sc->add_option("--seed", genSeed, "seed");
      sc->add_option("--truth", genTruth, "ground-truth sidecar file");
    }
  }

  // basis
  auto* basis = app.add_subcommand("basis", "Compute a low-rank basis");
  BasisOptions bo;
  basis->add_option("input", bo.input, "subspace file")->required();
  basis->add_option("--out", bo.out, "basis file");
  basis->add_option("--summary", bo.summary, "summary JSON (default stdout)");
  basis->add_option("--trace", bo.trace, "trace file");
  basis->add_option("--truth", bo.truth, "ground-truth sidecar for the error statistics");
  basis->add_option("--seed", bo.cfg.masterSeed, "master seed");
  basis->add_option("--starts", bo.cfg.numStarts, "rank-estimation starts per element")->check(CLI::PositiveNumber);
  basis->add_option("--delta", bo.cfg.phase1.delta, "shrinkage factor");
  basis->add_option("--tau-tol", bo.cfg.phase1.tauTol, "noise threshold for singular values");
  basis->add_option("--changeit", bo.cfg.phase1.changeit, "stop after this many steps without rank change");
  basis->add_option("--maxit", bo.cfg.phase2.maxit, "iteration limit of both phases");
  basis->add_option("--restartit", bo.cfg.phase1.restartit, "restart check period");
  basis->add_option("--restarttol", bo.cfg.restarttol, "restart threshold");
  basis->add_option("--tol", bo.cfg.phase2.tol, "Phase II tolerance");
  basis->add_option("--force-ranks", bo.forceRanks, "skip rank estimation and use r1,...,rd");

  // rank-estimate
  auto* rank = app.add_subcommand("rank-estimate", "Rank estimation from random starts");
  std::string rInput, rSummary;
  lrb::Phase1Config rp1;
  std::size_t rStarts = 1;
  std::uint64_t rSeed = 0;
  bool certify = false;
  rank->add_option("input", rInput, "subspace file")->required();
  rank->add_option("--starts", rStarts, "number of starts")->check(CLI::PositiveNumber);
  rank->add_option("--seed", rSeed, "seed");
  rank->add_option("--delta", rp1.delta, "shrinkage factor");
  rank->add_option("--tau-tol", rp1.tauTol, "noise threshold");
  rank->add_option("--changeit", rp1.changeit, "stop after this many steps without rank change");
  rank->add_option("--summary", rSummary, "report JSON (default stdout)");
  rank->add_flag("--certify", certify, "confirm each estimate by alternating projections");

  // cp-rank-one
  auto* cp = app.add_subcommand("cp-rank-one", "Rank-one basis through a CP decomposition");
  std::string cInput, cOut, cSummary;
  std::uint64_t cSeed = 0;
  cp->add_option("input", cInput, "subspace file")->required();
  cp->add_option("--out", cOut, "basis file");
  cp->add_option("--seed", cSeed, "seed");
  cp->add_option("--summary", cSummary, "summary JSON (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  std::string suite, bOut;
  std::size_t trials = 10;
  std::uint64_t bSeed = 0;
  bench->add_option("suite", suite, "table1 | table2 | convfactor | circulant | cp-compare")->required();
  bench->add_option("--trials", trials, "trials per row")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bSeed, "master seed");
  bench->add_option("--out", bOut, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*gen) {
      if (*synth) {
        const auto inst = lrb::generateSynthetic({sm, sn, parseRankList(sranks), genSeed, !noMix});
        std::vector<Matrix> mats;
        for (Eigen::Index j = 0; j < inst.sub.dim(); ++j)
          mats.push_back(inst.sub.element(j));
        lrb::io::writeMatrixSetFile(genOut, lrb::io::subspaceSet(mats));
        if (!genTruth.empty())
          lrb::io::writeMatrixSetFile(genTruth, lrb::io::groundTruthSet(inst.truth));
      } else if (*counter) {
        const auto ce = lrb::counterexampleSubspace(epsilon);
        lrb::io::writeMatrixSetFile(genOut, lrb::io::subspaceSet(ce.M));
      } else {
        const auto inst = lrb::circulantEigenproblem(nSide, cluster, spread, genSeed);
        std::vector<Matrix> mats;
        for (Eigen::Index j = 0; j < inst.sub.dim(); ++j)
          mats.push_back(inst.sub.element(j));
        lrb::io::writeMatrixSetFile(genOut, lrb::io::subspaceSet(mats));
        if (!genTruth.empty())
          lrb::io::writeMatrixSetFile(genTruth, lrb::io::groundTruthSet(inst.truth));
      }
      return kExitOk;
    }
    if (*basis) {
      bo.cfg.phase2.restartit = bo.cfg.phase1.restartit;
      bo.cfg.phase1.maxit = bo.cfg.phase2.maxit;
      return cmdBasis(bo);
    }
    if (*rank)
      return cmdRankEstimate(rInput, rp1, rStarts, rSeed, certify, rSummary);
    if (*cp)
      return cmdCpRankOne(cInput, cOut, cSeed, cSummary);
    if (*bench) {
      emit(bOut, lrb::bench::runSuite(suite, trials, bSeed, lrb::bench::threadCount()));
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "lrbasis: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
