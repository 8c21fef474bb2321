#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "schurlr/linear_operator.hpp"
#include "schurlr/simdist.hpp"

namespace schurlr {

struct KrylovParams {
  Index restart = 50;
  Real tol = 1e-6;  ///< on |b - A x| / |b|
  Index maxit = 1000;

  void validate() const;
};

struct SolveStats {
  Index iterations = 0;
  Real relative_residual = 0;  ///< explicit |b - A x| / |b| at exit
  bool converged = false;
  std::vector<Real> history;  ///< relative residual, initial value first
  /// Per restart boundary: (recurrence estimate, explicit residual).
  std::vector<std::pair<Real, Real>> restart_checks;
  double setup_seconds = 0;
  double iteration_seconds = 0;
};

template <Scalar T>
struct KrylovResult {
  Vector<T> x;
  SolveStats stats;
};

/// Restarted flexible GMRES. Stores the preconditioned directions Z, so the
/// preconditioner may change between iterations. An empty `precond` means
/// no preconditioning. Inner products and norms are counted on `fabric`.
template <Scalar T>
KrylovResult<T> fgmres(const LinearOperator<T>& a, const LinearOperator<T>& precond, std::span<const T> b,
                       const KrylovParams& params, std::span<const T> x0 = {}, Fabric* fabric = nullptr);

/// Restarted right-preconditioned GMRES with a fixed preconditioner; the
/// update is x += M (V y). An empty `precond` gives plain GMRES.
template <Scalar T>
KrylovResult<T> gmres_right(const LinearOperator<T>& a, const LinearOperator<T>& precond, std::span<const T> b,
                            const KrylovParams& params, std::span<const T> x0 = {}, Fabric* fabric = nullptr);

/// Plain restarted GMRES.
template <Scalar T>
KrylovResult<T> gmres(const LinearOperator<T>& a, std::span<const T> b, const KrylovParams& params,
                      std::span<const T> x0 = {}, Fabric* fabric = nullptr) {
  return gmres_right<T>(a, LinearOperator<T>{}, b, params, x0, fabric);
}

/// `iteration,relative_residual` rows.
void write_history_csv(std::ostream& out, const SolveStats& stats);

}  // namespace schurlr
