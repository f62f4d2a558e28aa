#include "lrb/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lrb {

namespace {

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    out.push_back(cur);
  if (!s.empty() && s.back() == sep)
    out.emplace_back();
  return out;
}

} // namespace

std::string formatTraceRow(const TraceRow& row)
{
  std::string sv;
  for (Eigen::Index i = 0; i < row.singularValues.size(); ++i) {
    if (i)
      sv += ',';
    sv += fmt17(row.singularValues(i));
  }
  std::ostringstream os;
  os << row.element << '\t' << row.phase << '\t' << row.iteration << '\t' << sv << '\t' << row.rankEstimate
     << '\t' << fmt17(row.residual) << '\t' << (row.restartFired ? 1 : 0) << '\t' << row.svdCount;
  return os.str();
}

TraceRow parseTraceRow(const std::string& line)
{
  const auto f = split(line, '\t');
  if (f.size() != 8)
    throw std::invalid_argument("trace row: expected 8 tab-separated fields, got " + std::to_string(f.size()));
  TraceRow row;
  try {
    row.element = std::stoull(f[0]);
    row.phase = std::stoi(f[1]);
    row.iteration = std::stoull(f[2]);
    const auto sv = f[3].empty() ? std::vector<std::string>{} : split(f[3], ',');
    row.singularValues.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t i = 0; i < sv.size(); ++i)
      row.singularValues(static_cast<Eigen::Index>(i)) = std::stod(sv[i]);
    row.rankEstimate = std::stol(f[4]);
    row.residual = std::stod(f[5]);
    row.restartFired = std::stoi(f[6]) != 0;
    row.svdCount = std::stoull(f[7]);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("trace row: malformed field in '" + line + "'");
  }
  if (row.phase != 1 && row.phase != 2)
    throw std::invalid_argument("trace row: phase must be 1 or 2");
  return row;
}

void writeTrace(std::ostream& os, const IterationTrace& trace)
{
  for (const auto& row : trace.rows)
    os << formatTraceRow(row) << '\n';
}

IterationTrace readTrace(std::istream& is)
{
  IterationTrace t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    t.rows.push_back(parseTraceRow(line));
  }
  return t;
}

std::string validateTrace(const IterationTrace& trace)
{
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const auto& a = trace.rows[i - 1];
    const auto& b = trace.rows[i];
    if (b.svdCount <= a.svdCount)
      return "svdCount not strictly increasing at row " + std::to_string(i);
    const auto ka = std::make_tuple(a.element, a.phase, a.iteration);
    const auto kb = std::make_tuple(b.element, b.phase, b.iteration);
    if (!(ka < kb))
      return "rows not ordered by (element, phase, iteration) at row " + std::to_string(i);
  }
  return {};
}

TraceSummary summarize(const std::vector<IterationTrace>& runs,
                       const std::optional<std::vector<Eigen::Index>>& groundTruthRanks)
{
  if (runs.empty())
    throw std::invalid_argument("summarize: no runs");
  TraceSummary s;
  s.runs = runs.size();
  s.againstGroundTruth = groundTruthRanks.has_value();

  for (const auto& run : runs) {
    if (run.empty())
      throw std::invalid_argument("summarize: empty trace");

    struct ElementRows {
      const TraceRow* firstPhase2 = nullptr;
      const TraceRow* lastPhase2 = nullptr;
      std::size_t phase1 = 0;
      std::size_t phase2 = 0;
    };
    std::map<std::size_t, ElementRows> elements;
    for (const auto& row : run.rows) {
      auto& e = elements[row.element];
      if (row.phase == 1) {
        ++e.phase1;
      } else {
        ++e.phase2;
        if (!e.firstPhase2)
          e.firstPhase2 = &row;
        e.lastPhase2 = &row;
      }
    }

    std::vector<std::pair<Eigen::Index, const ElementRows*>> ranked;
    for (const auto& [idx, e] : elements) {
      if (!e.lastPhase2)
        throw std::invalid_argument("summarize: element " + std::to_string(idx) + " has no phase-2 rows");
      ranked.emplace_back(e.lastPhase2->rankEstimate, &e);
    }

    std::vector<Eigen::Index> errorRanks(ranked.size());
    if (groundTruthRanks) {
      if (groundTruthRanks->size() != ranked.size())
        throw std::invalid_argument("summarize: ground truth has a different number of elements");
      std::vector<std::size_t> order(ranked.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return ranked[a].first < ranked[b].first; });
      auto truth = *groundTruthRanks;
      std::sort(truth.begin(), truth.end());
      for (std::size_t i = 0; i < order.size(); ++i)
        errorRanks[order[i]] = truth[i];
    } else {
      for (std::size_t i = 0; i < ranked.size(); ++i)
        errorRanks[i] = ranked[i].first;
    }

    double sumRanks = 0.0, err1 = 0.0, err2 = 0.0, it1 = 0.0, it2 = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const ElementRows& e = *ranked[i].second;
      sumRanks += static_cast<double>(ranked[i].first);
      const double e1 = kernels::truncationError(e.firstPhase2->singularValues, errorRanks[i]);
      const double e2 = kernels::truncationError(e.lastPhase2->singularValues, errorRanks[i]);
      err1 += e1 * e1;
      err2 += e2 * e2;
      it1 += static_cast<double>(e.phase1);
      it2 += static_cast<double>(e.phase2 - 1);
    }
    const double count = static_cast<double>(ranked.size());
    it1 /= count;
    it2 /= count;
    s.avgSumRanks += sumRanks;
    s.avgPhase1Error += std::sqrt(err1);
    s.avgPhase2Error += std::sqrt(err2);
    s.avgPhase1Iterations += it1;
    s.avgPhase2Iterations += it2;
  }

  const double n = static_cast<double>(runs.size());
  s.avgSumRanks /= n;
  s.avgPhase1Error /= n;
  s.avgPhase2Error /= n;
  s.avgPhase1Iterations /= n;
  s.avgPhase2Iterations /= n;
  return s;
}

} // namespace lrb
