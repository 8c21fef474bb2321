#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "schurlr/block_jacobi.hpp"
#include "schurlr/csr.hpp"
#include "schurlr/ilut.hpp"
#include "schurlr/linear_operator.hpp"
#include "schurlr/lowrank.hpp"
#include "schurlr/reorder.hpp"
#include "schurlr/simdist.hpp"

namespace schurlr {

struct MslrParams {
  int levels = 2;  ///< l_ev
  int parts = 4;   ///< p
  Index rank = 10;  ///< k, uniform over levels
  Real tau = 1e-2;
  Index lfil = 50;
  int max_cycles = 10;
  int root_inner_iters = 3;  ///< 0 selects single-pass mode
  Real shift_factor = 0.0;
  Index last_level_blocks = 0;  ///< 0 means `parts`

  void validate() const;
  Index jacobi_blocks() const noexcept { return last_level_blocks > 0 ? last_level_blocks : parts; }
};

/// One level of the hierarchy. With A_l = P_l^T C_{l-1} P_l (C_{-1} = A):
///   A_l = [B F; E C],  B block diagonal with one block per part.
struct MslrLevel {
  Index size = 0;  ///< n_l
  Index interior = 0;
  std::vector<Index> perm;     ///< new -> old, local to C_{l-1}
  std::vector<Index> offsets;  ///< block boundaries of B (parts + 1 entries)
  CsrMatrix<Complex> B, E, F, C;
  std::vector<CsrMatrix<Complex>> E_parts;  ///< column slices of E per part
  std::vector<IlutFactors<Complex>> factors;
  LowRankTerm term;

  Index interface() const noexcept { return size - interior; }
};

struct MslrLevelStats {
  Index size = 0, interior = 0, interface = 0;
  Index rank = 0;
  int cycles = 0;
  Index arnoldi_steps = 0;
  std::int64_t arnoldi_allreduces = 0;
  bool converged = true;
  Index factor_nnz = 0;
};

class MslrPreconditioner {
 public:
  /// Builds the hierarchy. Real input is promoted to complex. Arnoldi
  /// reductions of the bottom-up low-rank construction go to `fabric`.
  static MslrPreconditioner setup(const CsrMatrix<Complex>& a, const MslrParams& params, Fabric* fabric = nullptr);
  static MslrPreconditioner setup(const CsrMatrix<Real>& a, const MslrParams& params, Fabric* fabric = nullptr);

  /// M^{-1} b for the full system.
  Vector<Complex> apply(std::span<const Complex> b, Fabric* fabric = nullptr) const { return apply(0, b, fabric); }
  /// Approximate C_{l-1}^{-1} b, entered from the row layout (counts the
  /// redistribution reduction).
  Vector<Complex> apply(int l, std::span<const Complex> b, Fabric* fabric = nullptr) const;
  /// E_l B_l^{-1} F_l C_l^{-1} z with the lower levels standing in for C_l^{-1}.
  Vector<Complex> ghat_matvec(int l, std::span<const Complex> z, Fabric* fabric = nullptr) const;

  LinearOperator<Complex> as_operator(Fabric* fabric = nullptr) const;

  int levels() const noexcept { return static_cast<int>(levels_.size()); }
  Index size() const noexcept { return n_; }
  const MslrParams& params() const noexcept { return params_; }
  const MultilevelOrdering& ordering() const noexcept { return ordering_; }
  const MslrLevel& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }
  const BlockJacobi<Complex>& last_level() const noexcept { return last_; }
  std::span<const MslrLevelStats> stats() const noexcept { return stats_; }
  double setup_seconds() const noexcept { return setup_seconds_; }

  /// nnz(ILUT factors + block-Jacobi factors + low-rank terms) / nnz(A).
  Real fill() const;

 private:
  Vector<Complex> solve_level(int l, std::span<const Complex> b, Fabric* fabric) const;
  Vector<Complex> lower(int l, std::span<const Complex> z, Fabric* fabric) const;
  Vector<Complex> b_solve(const MslrLevel& lev, std::span<const Complex> x) const;
  Vector<Complex> e_product(const MslrLevel& lev, std::span<const Complex> z1, Fabric* fabric) const;
  Vector<Complex> schur_matvec(std::span<const Complex> z, Fabric* fabric) const;

  MslrParams params_;
  Index n_ = 0;
  Index nnz_a_ = 0;
  MultilevelOrdering ordering_;
  std::vector<MslrLevel> levels_;
  BlockJacobi<Complex> last_;
  std::vector<MslrLevelStats> stats_;
  double setup_seconds_ = 0;
};

struct CommPrediction {
  std::int64_t apply_allreduce = 0;
  std::int64_t arnoldi_per_step = 0;

  std::int64_t arnoldi_cycle_allreduce(Index m) const { return arnoldi_per_step * m; }
};

/// Closed-form reduction counts at level l of a single-pass hierarchy with
/// params.levels levels.
CommPrediction predict_comm(const MslrParams& params, int l);

/// `level,size,interior,interface,rank,cycles,arnoldi_steps,arnoldi_allreduces,factor_nnz`
void write_level_stats_csv(std::ostream& out, std::span<const MslrLevelStats> stats);

}  // namespace schurlr
