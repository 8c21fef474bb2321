#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "schurlr/csr.hpp"
#include "schurlr/dense.hpp"
#include "schurlr/linear_operator.hpp"

namespace schurlr {

/// Complex poles sigma_j, none on the real axis.
struct ShiftSet {
  std::vector<Complex> sigmas;
  Real radius = 0;
  bool conjugate_symmetric = false;

  /// Validates the poles and detects conjugate symmetry.
  static ShiftSet from_poles(std::vector<Complex> sigmas);

  Index size() const noexcept { return static_cast<Index>(sigmas.size()); }
  /// Index of the pole equal to conj(sigma_j), or -1.
  Index conjugate_of(Index j) const;
};

/// sigma_j = r exp(i pi (2j - 1) / k), j = 1..k. k must be even.
ShiftSet circle_poles(int k, Real r);

/// Piecewise constant weight on [a, b], zero outside.
struct WeightFunction {
  struct Piece {
    Real lo, hi, value;
  };
  Real a = -2.0;
  Real b = 2.0;
  Real base = 1.0;
  std::vector<Piece> pieces{{0.0, 0.15, 50.0}};

  Real operator()(Real t) const;
  /// Sorted points inside [a, b] where w may jump, including a and b.
  std::vector<Real> breakpoints() const;
};

/// Gamma_ij = int_a^b conj(phi_i(t)) phi_j(t) w(t) dt, phi_j(z) = sigma_j / (z - sigma_j),
/// by adaptive Gauss-Legendre split at the weight breakpoints.
CMatrix grammian(const ShiftSet& ss, const WeightFunction& w, Real abs_tol = 1e-10);

struct QpSolution {
  std::vector<Complex> alphas;
  Complex multiplier{};
  Real kkt_residual = 0;  ///< max-norm residual of the bordered system
  Real objective = 0;     ///< a^H Gamma a
};

/// Minimizes a^H Gamma a subject to sum(a) = 1 through the bordered system
/// [Gamma e; e^T 0] [a; mu] = [0; 1].
QpSolution solve_qp(const CMatrix& gamma);

/// a^H Gamma a.
Real qp_objective(const CMatrix& gamma, std::span<const Complex> a);

struct ShiftDesign {
  ShiftSet poles;
  std::vector<Complex> alphas;
  CMatrix gamma;
  Complex multiplier{};
  Real objective = 0;
  Real kkt_residual = 0;
  WeightFunction weight;
};

/// Optimal combination weights for the poles over w.
ShiftDesign design_shifts(const ShiftSet& ss, const WeightFunction& w);
/// alpha_j = 1/k.
ShiftDesign uniform_design(const ShiftSet& ss, const WeightFunction& w);

/// (A - sigma I)^{-1} r.
using ShiftedSolve = std::function<Vector<Complex>(Complex sigma, std::span<const Complex> r)>;

/// Shifted solves of a fixed real matrix with one factorization per pole.
class ShiftedSolver {
 public:
  enum class Kind { Dense, Ilut };

  static ShiftedSolver dense(const CsrMatrix<Real>& a);
  static ShiftedSolver ilut(const CsrMatrix<Real>& a, Real tau, Index lfil);

  Vector<Complex> solve(Complex sigma, std::span<const Complex> r);
  ShiftedSolve function() {
    return [this](Complex s, std::span<const Complex> r) { return solve(s, r); };
  }
  Index solve_count() const noexcept { return solves_; }
  Index size() const noexcept { return a_.rows(); }

 private:
  struct Entry;
  CsrMatrix<Complex> a_;
  Kind kind_ = Kind::Dense;
  Real tau_ = 0;
  Index lfil_ = 0;
  std::vector<std::shared_ptr<Entry>> cache_;
  Index solves_ = 0;
};

/// sum_j alpha_j (A - sigma_j I)^{-1} r. With `real_operator` set, a real r
/// and a conjugate-closed pole set, only one pole per pair is solved and the
/// partner solution is its conjugate.
Vector<Complex> apply_combined(const ShiftDesign& design, const ShiftedSolve& solve, std::span<const Complex> r,
                               bool real_operator = false);

struct RichardsonResult {
  Vector<Complex> x;
  Vector<Complex> r;
  std::vector<Real> residual_norms;  ///< |r_j|, r_0 first
};

/// One sweep x_{j+1} = x_j + (A - sigma_j I)^{-1} r_j, r_{j+1} = r_j - A delta
/// over the poles in order.
RichardsonResult richardson_compound(const LinearOperator<Complex>& a, const ShiftSet& ss,
                                     const ShiftedSolve& solve, std::span<const Complex> b,
                                     std::span<const Complex> x0);

/// Two Richardson steps with sigma and conj(sigma) on real data from a
/// single complex solve: x2 = x0 + Re(v) - (Re sigma / Im sigma) Im(v).
Vector<Real> conjugate_pair_step(const ShiftedSolve& solve, Complex sigma, std::span<const Real> r0,
                                 std::span<const Real> x0);

/// 1 - lambda sum_j alpha_j / (lambda - sigma_j).
Complex rho_eval(const ShiftDesign& design, Complex lambda);
/// prod_j -sigma_j / (lambda - sigma_j).
Complex rho_eval(const ShiftSet& ss, Complex lambda);

/// `index,sigma_re,sigma_im,alpha_re,alpha_im` rows, then `objective,<value>`.
void write_design_csv(std::ostream& out, const ShiftDesign& design);
/// `lambda,rho_re,rho_im,precond_re,precond_im` rows with precond = 1 - rho.
void write_spectrum_csv(std::ostream& out, const ShiftDesign& design, std::span<const Real> lambdas);

}  // namespace schurlr
