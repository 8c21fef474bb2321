#pragma once

// Dense Eigen oracles and random inputs shared by the test binaries.

#include <Eigen/Dense>
#include <random>

#include "schurlr/csr.hpp"
#include "schurlr/dense.hpp"
#include "schurlr/vector_ops.hpp"

namespace oracle {

using schurlr::Complex;
using schurlr::Index;
using schurlr::Real;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
Mat<T> dense(const schurlr::CsrMatrix<T>& a) {
  Mat<T> m = Mat<T>::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.row_cols(i).size(); ++k) m(i, a.row_cols(i)[k]) += a.row_values(i)[k];
  return m;
}

template <class T>
Mat<T> dense(const schurlr::DenseMatrix<T>& a) {
  Mat<T> m(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) m(i, j) = a(i, j);
  return m;
}

template <class T>
Vec<T> vec(const std::vector<T>& x) {
  return Eigen::Map<const Vec<T>>(x.data(), static_cast<Index>(x.size()));
}

template <class T>
std::vector<T> stdvec(const Vec<T>& x) {
  return std::vector<T>(x.data(), x.data() + x.size());
}

template <class T>
schurlr::DenseMatrix<T> from_eigen(const Mat<T>& m) {
  schurlr::DenseMatrix<T> a(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) a(i, j) = m(i, j);
  return a;
}

template <class T>
schurlr::CsrMatrix<T> sparse_from_eigen(const Mat<T>& m) {
  std::vector<schurlr::Triplet<T>> t;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != T(0)) t.push_back({i, j, m(i, j)});
  return schurlr::CsrMatrix<T>::from_triplets(m.rows(), m.cols(), t);
}

template <class T>
T draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  if constexpr (schurlr::is_complex_v<T>) {
    const Real re = u(rng);
    return T(re, u(rng));
  } else {
    return u(rng);
  }
}

template <class T>
std::vector<T> random_vector(Index n, std::mt19937_64& rng) {
  std::vector<T> x(n);
  for (auto& v : x) v = draw<T>(rng);
  return x;
}

/// Random sparse matrix with about `per_row` entries per row; with
/// `dominant` the diagonal is made strictly dominant.
template <class T>
schurlr::CsrMatrix<T> random_sparse(Index rows, Index cols, Index per_row, std::mt19937_64& rng,
                                    bool dominant = false) {
  std::uniform_int_distribution<Index> col(0, cols - 1);
  std::vector<schurlr::Triplet<T>> t;
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < per_row; ++k) t.push_back({i, col(rng), draw<T>(rng)});
    if (dominant && i < cols) t.push_back({i, i, T(static_cast<Real>(per_row) + 2.0)});
  }
  return schurlr::CsrMatrix<T>::from_triplets(rows, cols, t);
}

template <class T>
Mat<T> random_dense(Index rows, Index cols, std::mt19937_64& rng) {
  Mat<T> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = draw<T>(rng);
  return m;
}

template <class T>
Real rel_err(const std::vector<T>& got, const std::vector<T>& want) {
  const Real den = schurlr::norm2(want);
  return schurlr::norm2(schurlr::subtract(got, want)) / (den > 0 ? den : 1.0);
}

}  // namespace oracle
