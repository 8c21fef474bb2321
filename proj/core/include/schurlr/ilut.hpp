#pragma once

#include <span>

#include "schurlr/csr.hpp"
#include "schurlr/vector_ops.hpp"

namespace schurlr {

/// Incomplete factors L U ~ A + shift I. L is strictly lower (unit diagonal
/// implied), U is upper including the diagonal.
template <Scalar T>
struct IlutFactors {
  CsrMatrix<T> L;
  CsrMatrix<T> U;
  Real tau = 0;
  Index lfil = 0;
  T shift = T(0);

  Index size() const noexcept { return U.rows(); }
  Index nnz() const noexcept { return L.nnz() + U.nnz(); }
};

/// eta = shift_factor * i * sum|A_ii| / n. Throws for a nonzero shift on a
/// real matrix, which cannot hold it.
template <Scalar T>
T ilut_shift(const CsrMatrix<T>& a, Real shift_factor);

/// Row-wise IKJ ILUT of A + eta I. Entries below tau * ||A(i,:)||_2 are
/// dropped and at most lfil off-diagonal entries per row are kept in each
/// factor. No pivoting; a zero pivot throws ZeroPivotError.
template <Scalar T>
IlutFactors<T> ilut(const CsrMatrix<T>& a, Real tau, Index lfil, Real shift_factor = 0.0);

/// U^{-1} L^{-1} b.
template <Scalar T>
Vector<T> lu_solve(const IlutFactors<T>& f, std::span<const T> b);

template <Scalar T>
void lu_solve_inplace(const IlutFactors<T>& f, std::span<T> x);

/// The product L U as a sparse matrix.
template <Scalar T>
CsrMatrix<T> lu_product(const IlutFactors<T>& f);

/// max |U_ii| / min |U_ii|.
template <Scalar T>
Real pivot_ratio(const IlutFactors<T>& f);

}  // namespace schurlr
