#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "schurlr/dense.hpp"
#include "schurlr/linear_operator.hpp"
#include "schurlr/simdist.hpp"

namespace schurlr {


/// G V(:, 0:m) = V H with V orthonormal, H upper Hessenberg (m+1) x m.
struct ArnoldiResult {
  CMatrix V;
  CMatrix H;
  Real beta = 0;  ///< H(m, m-1)
  bool breakdown = false;

  Index steps() const noexcept { return H.cols(); }
};

/// Arnoldi with classical Gram-Schmidt and one reorthogonalization pass.
/// Each step does two reductions: V^H w (with |w|^2), and the second pass
/// fused with the normalization. Both are counted on `fabric` when given.
/// Stops early when the new direction vanishes (beta < 1e-14 |G v_j|).
ArnoldiResult arnoldi(const LinearOperator<Complex>& op, Index s, Index m, std::span<const Complex> v0,
                      Fabric* fabric = nullptr);

/// A = Q T Q^H with Q unitary and T upper triangular.
struct SchurForm {
  CMatrix Q;
  CMatrix T;

  std::vector<Complex> eigenvalues() const;
};

/// Householder reduction A = Q H Q^H, H upper Hessenberg.
struct HessenbergForm {
  CMatrix Q;
  CMatrix H;
};
HessenbergForm hessenberg_reduce(CMatrix a);

/// Complex single-shift QR with Wilkinson shifts and deflation on upper
/// Hessenberg input. Throws NumericalError after 100 m sweeps.
SchurForm hessenberg_schur(const CMatrix& h);

/// Schur form of a general square matrix (Hessenberg reduction first).
SchurForm schur(const CMatrix& a);

/// Swaps diagonal entries k and k+1 of the Schur form by a unitary rotation.
void swap_schur(SchurForm& sf, Index k);

/// Sort key of the correction: |gamma / (1 - gamma)|.
Real correction_weight(Complex gamma);

/// Reorders the Schur form so the first `count` diagonal entries have the
/// largest correction weights, in descending order.
void sort_schur(SchurForm& sf, Index count);

/// W (s x k, orthonormal columns) and R (k x k upper triangular).
struct LowRankTerm {
  CMatrix W;
  CMatrix R;

  Index size() const noexcept { return W.rows(); }
  Index rank() const noexcept { return W.cols(); }
  std::vector<Complex> eigenvalues() const;
  /// Stored entries: W plus the upper triangle of R.
  Index nnz() const noexcept { return W.rows() * W.cols() + R.rows() * (R.rows() + 1) / 2; }
};

/// Empty term acting on vectors of length s.
LowRankTerm zero_term(Index s);

/// W = V_m Q_k, R = T_k after sorting the Schur form of H_m. Throws if a
/// selected |1 - gamma| < 1e-12.
LowRankTerm select_rank_k(const ArnoldiResult& ar, SchurForm sf, Index k);

/// W [(I - R)^{-1} - I] W^H z. One reduction (for W^H z) when k > 0.
Vector<Complex> apply_correction(const LowRankTerm& t, std::span<const Complex> z, Fabric* fabric = nullptr);

struct SchurVectorsResult {
  LowRankTerm term;
  int cycles = 0;
  Index steps = 0;  ///< operator applications
  bool converged = false;
};

/// Thick-restart (Krylov-Schur) Arnoldi with cycle length m = min(2k, s).
/// Keeps k sorted Schur vectors per restart and stops when every selected
/// eigenvalue changes by less than 1e-2 relative, when the Krylov space is
/// invariant, or after max_cycles. A breakdown inside a cycle continues
/// with a fresh orthogonal direction.
SchurVectorsResult restarted_schur_vectors(const LinearOperator<Complex>& op, Index s, Index k, int max_cycles,
                                           Fabric* fabric = nullptr);

/// `index,real,imag,weight` rows.
void write_eigenvalues_csv(std::ostream& out, std::span<const Complex> eigenvalues);

}  // namespace schurlr
