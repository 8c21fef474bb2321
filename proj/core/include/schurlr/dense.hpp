#pragma once

#include <span>
#include <vector>

#include "schurlr/errors.hpp"
#include "schurlr/scalar.hpp"
#include "schurlr/vector_ops.hpp"

namespace schurlr {

/// Small column-major dense matrix (Arnoldi bases, Hessenberg and Schur
/// factors, Grammians).
template <Scalar T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative dimension");
  }

  static DenseMatrix identity(Index n) {
    DenseMatrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  T& operator()(Index i, Index j) noexcept { return data_[i + j * rows_]; }
  const T& operator()(Index i, Index j) const noexcept { return data_[i + j * rows_]; }

  std::span<T> col(Index j) noexcept { return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)}; }
  std::span<const T> col(Index j) const noexcept {
    return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  /// Copy of rows [r0, r0+nr) x cols [c0, c0+nc).
  DenseMatrix block(Index r0, Index c0, Index nr, Index nc) const {
    if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) {
      throw std::out_of_range("DenseMatrix::block: range outside matrix");
    }
    DenseMatrix b(nr, nc);
    for (Index j = 0; j < nc; ++j)
      for (Index i = 0; i < nr; ++i) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = DenseMatrix<Complex>;

template <Scalar T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  DenseMatrix<T> c(a.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index k = 0; k < a.cols(); ++k) {
      const T bkj = b(k, j);
      if (bkj == T(0)) continue;
      for (Index i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  return c;
}

template <Scalar T>
DenseMatrix<T> adjoint(const DenseMatrix<T>& a) {
  DenseMatrix<T> t(a.cols(), a.rows());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) t(j, i) = conj(a(i, j));
  return t;
}

template <Scalar T>
Vector<T> matvec(const DenseMatrix<T>& a, std::span<const T> x) {
  require_same_size(x.size(), static_cast<std::size_t>(a.cols()), "matvec");
  Vector<T> y(a.rows(), T(0));
  for (Index j = 0; j < a.cols(); ++j) {
    const T xj = x[j];
    for (Index i = 0; i < a.rows(); ++i) y[i] += a(i, j) * xj;
  }
  return y;
}

/// A^H x.
template <Scalar T>
Vector<T> adjoint_matvec(const DenseMatrix<T>& a, std::span<const T> x) {
  require_same_size(x.size(), static_cast<std::size_t>(a.rows()), "adjoint_matvec");
  Vector<T> y(a.cols());
  for (Index j = 0; j < a.cols(); ++j) y[j] = dot<T>(a.col(j), x);
  return y;
}

template <Scalar T>
Real frobenius_norm(const DenseMatrix<T>& a) {
  return norm2<T>(a.data());
}

template <Scalar T>
DenseMatrix<T> operator-(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("dense subtract");
  DenseMatrix<T> c(a);
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

/// Solves an upper-triangular system in place (U x = b).
template <Scalar T>
void upper_solve_inplace(const DenseMatrix<T>& u, std::span<T> b) {
  require_same_size(b.size(), static_cast<std::size_t>(u.rows()), "upper_solve");
  for (Index i = u.rows() - 1; i >= 0; --i) {
    T s = b[i];
    for (Index j = i + 1; j < u.cols(); ++j) s -= u(i, j) * b[j];
    if (u(i, i) == T(0)) throw NumericalError("upper_solve: zero diagonal");
    b[i] = s / u(i, i);
  }
}

/// LU with partial pivoting of a square dense matrix.
template <Scalar T>
class DenseLu {
 public:
  explicit DenseLu(DenseMatrix<T> a) : lu_(std::move(a)), piv_(lu_.rows()) {
    if (lu_.rows() != lu_.cols()) throw DimensionMismatch("DenseLu: matrix not square");
    const Index n = lu_.rows();
    Real scale = 0;
    for (const T& v : lu_.data()) scale = std::max(scale, std::abs(v));
    for (Index k = 0; k < n; ++k) {
      Index p = k;
      Real best = std::abs(lu_(k, k));
      for (Index i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      }
      if (best <= 1e-14 * scale || best == 0) throw NumericalError("DenseLu: matrix is singular");
      piv_[k] = p;
      if (p != k)
        for (Index j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      const T inv = T(1) / lu_(k, k);
      for (Index i = k + 1; i < n; ++i) lu_(i, k) *= inv;
      for (Index j = k + 1; j < n; ++j) {
        const T ukj = lu_(k, j);
        if (ukj == T(0)) continue;
        for (Index i = k + 1; i < n; ++i) lu_(i, j) -= lu_(i, k) * ukj;
      }
    }
  }

  Index size() const noexcept { return lu_.rows(); }

  Vector<T> solve(std::span<const T> b) const {
    require_same_size(b.size(), static_cast<std::size_t>(size()), "DenseLu::solve");
    Vector<T> x(b.begin(), b.end());
    const Index n = size();
    for (Index k = 0; k < n; ++k) std::swap(x[k], x[piv_[k]]);
    for (Index j = 0; j < n; ++j) {
      const T xj = x[j];
      for (Index i = j + 1; i < n; ++i) x[i] -= lu_(i, j) * xj;
    }
    for (Index j = n - 1; j >= 0; --j) {
      x[j] /= lu_(j, j);
      const T xj = x[j];
      for (Index i = 0; i < j; ++i) x[i] -= lu_(i, j) * xj;
    }
    return x;
  }

 private:
  DenseMatrix<T> lu_;
  std::vector<Index> piv_;
};

}  // namespace schurlr
