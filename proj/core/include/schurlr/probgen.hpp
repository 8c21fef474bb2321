#pragma once

#include "schurlr/csr.hpp"

namespace schurlr {

/// Box grid with a reaction shift gamma on the diagonal.
struct GridSpec {
  Index nx = 1;
  Index ny = 1;
  Index nz = 1;
  Real gamma = 0.0;
};

/// Unscaled 7-point stencil: 6 - gamma on the diagonal, -1 to each existing
/// neighbor, lexicographic ordering (x fastest).
template <Scalar T = Real>
CsrMatrix<T> laplacian_7pt(const GridSpec& spec);

/// Unscaled 5-point stencil minus shift * I.
CsrMatrix<Real> shifted_laplacian_2d(Index nx, Index ny, Real shift);

/// diag(lo + i/(n-1) (hi - lo)).
CsrMatrix<Real> uniform_spectrum_diag(Index n, Real lo, Real hi);

/// A * ones, the right-hand side whose solution is all ones.
template <Scalar T>
std::vector<T> rhs_for_ones(const CsrMatrix<T>& a) {
  const std::vector<T> ones(a.cols(), T(1));
  return spmv<T>(a, ones);
}

}  // namespace schurlr
