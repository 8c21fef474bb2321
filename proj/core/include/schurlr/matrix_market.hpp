#pragma once

#include <iosfwd>
#include <string>

#include "schurlr/csr.hpp"

namespace schurlr {

enum class MmField { Real, Complex };
enum class MmSymmetry { General, Symmetric, Hermitian, SkewSymmetric };

struct MmHeader {
  MmField field = MmField::Real;
  MmSymmetry symmetry = MmSymmetry::General;
  Index rows = 0;
  Index cols = 0;
  Index entries = 0;
};

/// Parses the banner and size line only.
MmHeader read_matrix_market_header(std::istream& in);
MmHeader read_matrix_market_header(const std::string& path);

/// Coordinate Matrix Market reader. Symmetric/Hermitian storage is expanded
/// to the full matrix; indices are 1-based on disk.
template <Scalar T>
CsrMatrix<T> read_matrix_market(std::istream& in);

template <Scalar T>
CsrMatrix<T> read_matrix_market(const std::string& path);

/// Writes coordinate/general with 17 significant digits, so reading back is
/// exact.
template <Scalar T>
void write_matrix_market(const CsrMatrix<T>& a, std::ostream& out);

template <Scalar T>
void write_matrix_market(const CsrMatrix<T>& a, const std::string& path);

}  // namespace schurlr
