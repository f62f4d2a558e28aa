#include "lrb/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lrb::io {

std::string formatDouble(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-blank, non-comment line split into tokens; throws at end of input.
  std::vector<std::string> next(const char* expecting)
  {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#')
        continue;
      std::istringstream in(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (in >> tok)
        tokens.push_back(tok);
      return tokens;
    }
    throw ParseError(std::string("unexpected end of input, expected ") + expecting, line_ + 1);
  }

  std::size_t line() const { return line_; }

private:
  std::istream& is_;
  std::size_t line_ = 0;
};

double parseDouble(const std::string& tok, std::size_t line)
{
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError("invalid number '" + tok + "'", line);
  return v;
}

Eigen::Index parseCount(const std::string& tok, std::size_t line, const char* what)
{
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || v < 0)
    throw ParseError(std::string("invalid ") + what + " '" + tok + "'", line);
  return static_cast<Eigen::Index>(v);
}

Matrix readMatrixBody(LineReader& lr, Eigen::Index m, Eigen::Index n)
{
  Matrix M(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto tok = lr.next("matrix row");
    if (static_cast<Eigen::Index>(tok.size()) != n)
      throw ParseError("expected " + std::to_string(n) + " entries, found " + std::to_string(tok.size()),
                       lr.line());
    for (Eigen::Index j = 0; j < n; ++j)
      M(i, j) = parseDouble(tok[static_cast<std::size_t>(j)], lr.line());
  }
  return M;
}

Matrix readMatrix(LineReader& lr, Eigen::Index m = -1, Eigen::Index n = -1)
{
  const auto head = lr.next("matrix header");
  if (head.size() != 3 || head[0] != "matrix")
    throw ParseError("expected 'matrix m n'", lr.line());
  const Eigen::Index mm = parseCount(head[1], lr.line(), "row count");
  const Eigen::Index nn = parseCount(head[2], lr.line(), "column count");
  if (mm < 1 || nn < 1)
    throw ParseError("matrix dimensions must be positive", lr.line());
  if ((m >= 0 && mm != m) || (n >= 0 && nn != n))
    throw ParseError("matrix block is " + head[1] + "x" + head[2] + ", expected " + std::to_string(m) + "x" +
                       std::to_string(n),
                     lr.line());
  return readMatrixBody(lr, mm, nn);
}

} // namespace

Matrix readMatrix(std::istream& is)
{
  LineReader lr(is);
  return readMatrix(lr);
}

void writeMatrix(std::ostream& os, const Matrix& M)
{
  os << "matrix " << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j)
        os << ' ';
      os << formatDouble(M(i, j));
    }
    os << '\n';
  }
}

MatrixSet readMatrixSet(std::istream& is)
{
  LineReader lr(is);
  const auto head = lr.next("header");
  if (head.size() != 4 || (head[0] != "subspace" && head[0] != "tensor" && head[0] != "groundtruth"))
    throw ParseError("expected 'subspace m n d', 'tensor m n d' or 'groundtruth m n d'", lr.line());
  MatrixSet set;
  set.kind = head[0];
  set.m = parseCount(head[1], lr.line(), "row count");
  set.n = parseCount(head[2], lr.line(), "column count");
  const Eigen::Index d = parseCount(head[3], lr.line(), "dimension");
  if (set.m < 1 || set.n < 1 || d < 1)
    throw ParseError("dimensions must be positive", lr.line());
  if (set.kind == "groundtruth") {
    const auto r = lr.next("ranks line");
    if (r.empty() || r[0] != "ranks" || static_cast<Eigen::Index>(r.size()) != d + 1)
      throw ParseError("expected 'ranks' followed by " + std::to_string(d) + " counts", lr.line());
    for (std::size_t i = 1; i < r.size(); ++i)
      set.ranks.push_back(parseCount(r[i], lr.line(), "rank"));
  }
  for (Eigen::Index k = 0; k < d; ++k)
    set.mats.push_back(readMatrix(lr, set.m, set.n));
  std::string rest;
  while (std::getline(is, rest)) {
    const auto first = rest.find_first_not_of(" \t\r");
    if (first != std::string::npos && rest[first] != '#')
      throw ParseError("trailing content after " + std::to_string(d) + " blocks", 0);
  }
  return set;
}

void writeMatrixSet(std::ostream& os, const MatrixSet& set)
{
  os << set.kind << ' ' << set.m << ' ' << set.n << ' ' << set.mats.size() << '\n';
  if (set.kind == "groundtruth") {
    os << "ranks";
    for (auto r : set.ranks)
      os << ' ' << r;
    os << '\n';
  }
  for (const auto& M : set.mats)
    writeMatrix(os, M);
}

MatrixSet readMatrixSetFile(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open '" + path + "'", 0);
  try {
    return readMatrixSet(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void writeMatrixSetFile(const std::string& path, const MatrixSet& set)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  writeMatrixSet(out, set);
  if (!out)
    throw std::runtime_error("write to '" + path + "' failed");
}

MatrixSet subspaceSet(const std::vector<Matrix>& mats)
{
  if (mats.empty())
    throw std::invalid_argument("subspaceSet: no matrices");
  return MatrixSet{"subspace", mats.front().rows(), mats.front().cols(), mats, {}};
}

MatrixSet groundTruthSet(const GroundTruth& truth)
{
  if (truth.basis.empty())
    throw std::invalid_argument("groundTruthSet: no matrices");
  return MatrixSet{"groundtruth", truth.basis.front().rows(), truth.basis.front().cols(), truth.basis, truth.ranks};
}

} // namespace lrb::io
