#pragma once

#include "lrb/problems.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrb::io {

/// Malformed input; line() is 1-based (0 when the error is not tied to a line).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Text formats. Blank lines and lines starting with '#' are ignored.
///
///   matrix m n            followed by m rows of n numbers
///   subspace m n d        followed by d matrix blocks
///   tensor m n d          followed by d matrix blocks (the slices)
///   groundtruth m n d     followed by "ranks r_1 ... r_d" and d matrix blocks
///
/// Numbers are written with 17 significant digits.
struct MatrixSet {
  std::string kind;  ///< "subspace", "tensor" or "groundtruth"
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<Matrix> mats;
  std::vector<Eigen::Index> ranks;  ///< groundtruth only
};

Matrix readMatrix(std::istream& is);
void writeMatrix(std::ostream& os, const Matrix& M);

MatrixSet readMatrixSet(std::istream& is);
void writeMatrixSet(std::ostream& os, const MatrixSet& set);

MatrixSet readMatrixSetFile(const std::string& path);
void writeMatrixSetFile(const std::string& path, const MatrixSet& set);

MatrixSet subspaceSet(const std::vector<Matrix>& mats);
MatrixSet groundTruthSet(const GroundTruth& truth);

/// "%.17g".
std::string formatDouble(double v);

} // namespace lrb::io
