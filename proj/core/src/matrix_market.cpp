#include "schurlr/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace schurlr {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace

MmHeader read_matrix_market_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("Matrix Market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix") {
    throw ParseError("Matrix Market: missing %%MatrixMarket matrix banner");
  }
  if (lower(format) != "coordinate") throw ParseError("Matrix Market: only coordinate format is supported");

  MmHeader h;
  field = lower(field);
  if (field == "real" || field == "integer" || field == "double") {
    h.field = MmField::Real;
  } else if (field == "complex") {
    h.field = MmField::Complex;
  } else {
    throw ParseError("Matrix Market: unsupported field '" + field + "'");
  }
  symmetry = lower(symmetry);
  if (symmetry == "general") {
    h.symmetry = MmSymmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = MmSymmetry::Symmetric;
  } else if (symmetry == "hermitian") {
    h.symmetry = MmSymmetry::Hermitian;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = MmSymmetry::SkewSymmetric;
  } else {
    throw ParseError("Matrix Market: unsupported symmetry '" + symmetry + "'");
  }

  if (!next_data_line(in, line)) throw ParseError("Matrix Market: missing size line");
  std::istringstream sizes(line);
  if (!(sizes >> h.rows >> h.cols >> h.entries) || h.rows < 0 || h.cols < 0 || h.entries < 0) {
    throw ParseError("Matrix Market: malformed size line");
  }
  if (h.symmetry != MmSymmetry::General && h.rows != h.cols) {
    throw ParseError("Matrix Market: symmetric storage requires a square matrix");
  }
  return h;
}

MmHeader read_matrix_market_header(const std::string& path) {
  auto in = open_in(path);
  return read_matrix_market_header(in);
}

template <Scalar T>
CsrMatrix<T> read_matrix_market(std::istream& in) {
  const MmHeader h = read_matrix_market_header(in);
  if constexpr (!is_complex_v<T>) {
    if (h.field == MmField::Complex) throw ParseError("Matrix Market: complex file read as real");
  }
  std::vector<Triplet<T>> entries;
  entries.reserve(static_cast<std::size_t>(h.symmetry == MmSymmetry::General ? h.entries : 2 * h.entries));
  std::string line;
  for (Index k = 0; k < h.entries; ++k) {
    if (!next_data_line(in, line)) throw ParseError("Matrix Market: fewer entries than declared");
    std::istringstream ls(line);
    Index i = 0, j = 0;
    double re = 0, im = 0;
    if (!(ls >> i >> j >> re)) throw ParseError("Matrix Market: malformed entry line " + std::to_string(k + 1));
    if (h.field == MmField::Complex && !(ls >> im)) {
      throw ParseError("Matrix Market: missing imaginary part on entry " + std::to_string(k + 1));
    }
    if (i < 1 || i > h.rows || j < 1 || j > h.cols) {
      throw ParseError("Matrix Market: index out of range on entry " + std::to_string(k + 1));
    }
    T v;
    if constexpr (is_complex_v<T>) {
      v = T(re, im);
    } else {
      v = re;
    }
    entries.push_back({i - 1, j - 1, v});
    if (i != j) {
      switch (h.symmetry) {
        case MmSymmetry::General: break;
        case MmSymmetry::Symmetric: entries.push_back({j - 1, i - 1, v}); break;
        case MmSymmetry::Hermitian: entries.push_back({j - 1, i - 1, conj(v)}); break;
        case MmSymmetry::SkewSymmetric: entries.push_back({j - 1, i - 1, -v}); break;
      }
    }
  }
  return CsrMatrix<T>::from_triplets(h.rows, h.cols, entries);
}

template <Scalar T>
CsrMatrix<T> read_matrix_market(const std::string& path) {
  auto in = open_in(path);
  return read_matrix_market<T>(in);
}

template <Scalar T>
void write_matrix_market(const CsrMatrix<T>& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate " << (is_complex_v<T> ? "complex" : "real") << " general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ';
      if constexpr (is_complex_v<T>) {
        out << vals[k].real() << ' ' << vals[k].imag() << '\n';
      } else {
        out << vals[k] << '\n';
      }
    }
  }
}

template <Scalar T>
void write_matrix_market(const CsrMatrix<T>& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  write_matrix_market(a, out);
  if (!out) throw ParseError("write failed: " + path);
}

template CsrMatrix<Real> read_matrix_market<Real>(std::istream&);
template CsrMatrix<Complex> read_matrix_market<Complex>(std::istream&);
template CsrMatrix<Real> read_matrix_market<Real>(const std::string&);
template CsrMatrix<Complex> read_matrix_market<Complex>(const std::string&);
template void write_matrix_market<Real>(const CsrMatrix<Real>&, std::ostream&);
template void write_matrix_market<Complex>(const CsrMatrix<Complex>&, std::ostream&);
template void write_matrix_market<Real>(const CsrMatrix<Real>&, const std::string&);
template void write_matrix_market<Complex>(const CsrMatrix<Complex>&, const std::string&);

}  // namespace schurlr
