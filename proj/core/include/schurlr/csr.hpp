#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "schurlr/errors.hpp"
#include "schurlr/scalar.hpp"

namespace schurlr {

template <Scalar T>
struct Triplet {
  Index row;
  Index col;
  T value;
};

/// Compressed sparse row matrix. Always canonical: columns strictly
/// increasing within a row, no duplicates. Every constructor normalizes.
template <Scalar T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix() : row_ptr_(1, 0) {}

  /// Empty (all-zero) rows x cols matrix.
  CsrMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("CsrMatrix: negative dimension");
  }

  /// Takes raw CSR arrays; rows are sorted and duplicates summed.
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
            std::vector<T> values)
      : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("CsrMatrix: negative dimension");
    if (static_cast<Index>(row_ptr_.size()) != rows + 1 || row_ptr_.front() != 0 ||
        col_idx_.size() != values_.size() ||
        row_ptr_.back() != static_cast<Index>(col_idx_.size())) {
      throw std::invalid_argument("CsrMatrix: inconsistent CSR arrays");
    }
    for (Index i = 0; i < rows; ++i) {
      if (row_ptr_[i + 1] < row_ptr_[i]) throw std::invalid_argument("CsrMatrix: row_ptr decreasing");
    }
    for (Index c : col_idx_) {
      if (c < 0 || c >= cols) throw std::out_of_range("CsrMatrix: column index out of range");
    }
    normalize();
  }

  /// Builds from coordinate entries; duplicate (row, col) pairs are summed.
  static CsrMatrix from_triplets(Index rows, Index cols, std::span<const Triplet<T>> entries) {
    std::vector<Index> ptr(rows + 1, 0);
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
        throw std::out_of_range("CsrMatrix::from_triplets: index out of range");
      }
      ++ptr[t.row + 1];
    }
    std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
    std::vector<Index> col(entries.size());
    std::vector<T> val(entries.size());
    std::vector<Index> next(ptr.begin(), ptr.end() - 1);
    for (const auto& t : entries) {
      const Index k = next[t.row]++;
      col[k] = t.col;
      val[k] = t.value;
    }
    return CsrMatrix(rows, cols, std::move(ptr), std::move(col), std::move(val));
  }

  static CsrMatrix identity(Index n) {
    std::vector<Index> ptr(n + 1), col(n);
    std::iota(ptr.begin(), ptr.end(), Index{0});
    std::iota(col.begin(), col.end(), Index{0});
    return CsrMatrix(n, n, std::move(ptr), std::move(col), std::vector<T>(n, T(1)));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(col_idx_.size()); }

  std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const T> values() const noexcept { return values_; }

  std::span<const Index> row_cols(Index i) const noexcept {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const T> row_values(Index i) const noexcept {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Stored value at (i, j), zero if absent.
  T at(Index i, Index j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return T(0);
    return values_[row_ptr_[i] + (it - cols.begin())];
  }

  /// Checks every canonical-form invariant.
  bool is_canonical() const {
    if (static_cast<Index>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0) return false;
    if (row_ptr_.back() != nnz() || values_.size() != col_idx_.size()) return false;
    for (Index i = 0; i < rows_; ++i) {
      if (row_ptr_[i + 1] < row_ptr_[i]) return false;
      for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (col_idx_[k] < 0 || col_idx_[k] >= cols_) return false;
        if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) return false;
      }
    }
    return true;
  }

  friend bool operator==(const CsrMatrix& a, const CsrMatrix& b) = default;

 private:
  void normalize() {
    std::vector<std::pair<Index, T>> row;
    Index out = 0;
    Index start = 0;
    for (Index i = 0; i < rows_; ++i) {
      const Index end = row_ptr_[i + 1];
      row.clear();
      for (Index k = start; k < end; ++k) row.emplace_back(col_idx_[k], values_[k]);
      std::stable_sort(row.begin(), row.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      row_ptr_[i] = out;
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (out > row_ptr_[i] && col_idx_[out - 1] == row[k].first) {
          values_[out - 1] += row[k].second;
        } else {
          col_idx_[out] = row[k].first;
          values_[out] = row[k].second;
          ++out;
        }
      }
      start = end;
    }
    row_ptr_[rows_] = out;
    col_idx_.resize(out);
    values_.resize(out);
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<T> values_;
};

/// y = A x.
template <Scalar T>
void spmv_into(const CsrMatrix<T>& a, std::span<const T> x, std::span<T> y) {
  require_same_size(x.size(), static_cast<std::size_t>(a.cols()), "spmv (x)");
  require_same_size(y.size(), static_cast<std::size_t>(a.rows()), "spmv (y)");
  const auto ptr = a.row_ptr();
  const auto col = a.col_idx();
  const auto val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    T sum(0);
    for (Index k = ptr[i]; k < ptr[i + 1]; ++k) sum += val[k] * x[col[k]];
    y[i] = sum;
  }
}

template <Scalar T>
std::vector<T> spmv(const CsrMatrix<T>& a, std::span<const T> x) {
  std::vector<T> y(a.rows());
  spmv_into<T>(a, x, y);
  return y;
}

template <Scalar T>
CsrMatrix<T> transpose(const CsrMatrix<T>& a) {
  std::vector<Index> ptr(a.cols() + 1, 0);
  for (Index c : a.col_idx()) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<Index> col(a.nnz());
  std::vector<T> val(a.nnz());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index dst = next[cols[k]]++;
      col[dst] = i;
      val[dst] = vals[k];
    }
  }
  return CsrMatrix<T>(a.cols(), a.rows(), std::move(ptr), std::move(col), std::move(val));
}

/// Symmetric permutation: result(i, j) = a(perm[i], perm[j]).
template <Scalar T>
CsrMatrix<T> permute_symmetric(const CsrMatrix<T>& a, std::span<const Index> perm) {
  require_same_size(perm.size(), static_cast<std::size_t>(a.rows()), "permute_symmetric");
  if (a.rows() != a.cols()) throw DimensionMismatch("permute_symmetric: matrix not square");
  const Index n = a.rows();
  std::vector<Index> inv(n, -1);
  for (Index i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || inv[perm[i]] != -1) {
      throw std::invalid_argument("permute_symmetric: not a permutation");
    }
    inv[perm[i]] = i;
  }
  std::vector<Index> ptr(n + 1, 0);
  for (Index i = 0; i < n; ++i) ptr[i + 1] = ptr[i] + static_cast<Index>(a.row_cols(perm[i]).size());
  std::vector<Index> col(a.nnz());
  std::vector<T> val(a.nnz());
  for (Index i = 0; i < n; ++i) {
    const auto cols = a.row_cols(perm[i]);
    const auto vals = a.row_values(perm[i]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      col[ptr[i] + k] = inv[cols[k]];
      val[ptr[i] + k] = vals[k];
    }
  }
  return CsrMatrix<T>(n, n, std::move(ptr), std::move(col), std::move(val));
}

/// Submatrix of rows [r0, r1) and columns [c0, c1).
template <Scalar T>
CsrMatrix<T> extract_block(const CsrMatrix<T>& a, Index r0, Index r1, Index c0, Index c1) {
  if (r0 < 0 || r1 > a.rows() || r0 > r1 || c0 < 0 || c1 > a.cols() || c0 > c1) {
    throw std::out_of_range("extract_block: range outside matrix");
  }
  std::vector<Index> ptr(r1 - r0 + 1, 0);
  std::vector<Index> col;
  std::vector<T> val;
  for (Index i = r0; i < r1; ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    const auto lo = std::lower_bound(cols.begin(), cols.end(), c0) - cols.begin();
    const auto hi = std::lower_bound(cols.begin(), cols.end(), c1) - cols.begin();
    for (auto k = lo; k < hi; ++k) {
      col.push_back(cols[k] - c0);
      val.push_back(vals[k]);
    }
    ptr[i - r0 + 1] = static_cast<Index>(col.size());
  }
  return CsrMatrix<T>(r1 - r0, c1 - c0, std::move(ptr), std::move(col), std::move(val));
}

template <Scalar To, Scalar From>
CsrMatrix<To> convert(const CsrMatrix<From>& a) {
  if constexpr (std::is_same_v<To, From>) {
    return a;
  } else {
    static_assert(is_complex_v<To>, "convert: only real -> complex promotion is lossless");
    std::vector<To> val(a.values().begin(), a.values().end());
    return CsrMatrix<To>(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                         {a.col_idx().begin(), a.col_idx().end()}, std::move(val));
  }
}

template <Scalar T>
Real frobenius_norm(const CsrMatrix<T>& a) {
  Real s = 0;
  for (const T& v : a.values()) s += abs2(v);
  return std::sqrt(s);
}

template <Scalar T>
std::vector<T> diagonal(const CsrMatrix<T>& a) {
  std::vector<T> d(std::min(a.rows(), a.cols()));
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = a.at(i, i);
  return d;
}

}  // namespace schurlr
