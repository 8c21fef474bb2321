#pragma once

#include <stdexcept>
#include <string>

namespace schurlr {

/// Operand sizes do not conform.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file or stream.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not continue (zero pivot, singular system,
/// non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ILUT hit a zero pivot; `row()` is the row of the factored matrix.
class ZeroPivotError : public NumericalError {
 public:
  explicit ZeroPivotError(std::ptrdiff_t row)
      : NumericalError("zero pivot in row " + std::to_string(row)), row_(row) {}
  std::ptrdiff_t row() const noexcept { return row_; }

 private:
  std::ptrdiff_t row_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": size " + std::to_string(a) +
                            " does not match " + std::to_string(b));
  }
}

}  // namespace schurlr
