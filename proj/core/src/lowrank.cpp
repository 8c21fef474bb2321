#include "schurlr/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace schurlr {

namespace {

constexpr Real kBreakdown = 1e-14;
constexpr Real kDeflate = 1e-12;
// Below this ratio the fused norm |w|^2 - |h2|^2 loses too many digits and
// the norm is recomputed explicitly.
constexpr Real kRecompute = 1e-3;

// [c s; -conj(s) c] [f; g] = [r; 0].
struct Rotation {
  Real c = 1;
  Complex s = 0;
};

Rotation make_rotation(Complex f, Complex g) {
  const Real af = std::abs(f), ag = std::abs(g);
  if (ag == 0) return {1.0, 0.0};
  const Real r = std::hypot(af, ag);
  const Complex phase = af == 0 ? Complex(1) : f / af;
  return {af / r, phase * std::conj(g) / r};
}

// Rows i, k of columns [c0, c1).
void rotate_rows(CMatrix& a, Index i, Index k, const Rotation& g, Index c0, Index c1) {
  for (Index j = c0; j < c1; ++j) {
    const Complex x = a(i, j), y = a(k, j);
    a(i, j) = g.c * x + g.s * y;
    a(k, j) = -std::conj(g.s) * x + g.c * y;
  }
}

// Columns i, k of rows [r0, r1), multiplied by the adjoint rotation.
void rotate_cols(CMatrix& a, Index i, Index k, const Rotation& g, Index r0, Index r1) {
  for (Index r = r0; r < r1; ++r) {
    const Complex x = a(r, i), y = a(r, k);
    a(r, i) = g.c * x + std::conj(g.s) * y;
    a(r, k) = -g.s * x + g.c * y;
  }
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex m = 0.5 * (a + d);
  const Complex e1 = m + disc, e2 = m - disc;
  return std::abs(e1 - d) <= std::abs(e2 - d) ? e1 : e2;
}

// Orthogonalizes w against columns [0, j] of V in two passes; returns the
// coefficients in h and |w| before orthogonalization in w0norm.
struct Orth {
  Vector<Complex> h;
  Real w0norm = 0;
  Real beta = 0;
};

Orth orthogonalize(const CMatrix& v, Index ncols, Vector<Complex>& w, Fabric* fabric) {
  Orth o;
  o.h.assign(ncols, Complex(0));
  // pass 1: [V^H w; w^H w]
  Vector<Complex> h1(ncols);
  for (Index i = 0; i < ncols; ++i) h1[i] = dot<Complex>(v.col(i), w);
  o.w0norm = norm2(w);
  if (fabric) fabric->record_allreduce(ncols + 1);
  for (Index i = 0; i < ncols; ++i) axpy_inplace<Complex>(-h1[i], v.col(i), w);
  // pass 2 fused with the norm: [V^H w; w^H w]
  Vector<Complex> h2(ncols);
  for (Index i = 0; i < ncols; ++i) h2[i] = dot<Complex>(v.col(i), w);
  const Real wn = norm2(w);
  const Real ww = wn * wn;
  if (fabric) fabric->record_allreduce(ncols + 1);
  Real h2sq = 0;
  for (Index i = 0; i < ncols; ++i) {
    axpy_inplace<Complex>(-h2[i], v.col(i), w);
    o.h[i] = h1[i] + h2[i];
    h2sq += abs2(h2[i]);
  }
  const Real beta2 = ww - h2sq;
  if (beta2 > kRecompute * ww) {
    o.beta = std::sqrt(beta2);
  } else {
    o.beta = norm2(w);
    if (fabric) fabric->record_allreduce(1);
  }
  return o;
}

// A unit vector orthogonal to columns [0, ncols) of V, from the first
// coordinate direction that survives orthogonalization.
Vector<Complex> fresh_direction(const CMatrix& v, Index ncols, Fabric* fabric) {
  const Index s = v.rows();
  for (Index e = 0; e < s; ++e) {
    Vector<Complex> w(s, Complex(0));
    w[e] = 1;
    const Orth o = orthogonalize(v, ncols, w, fabric);
    if (o.beta > 0.5) {
      scale<Complex>(Complex(1.0 / o.beta), w);
      return w;
    }
  }
  throw NumericalError("arnoldi: no direction orthogonal to the basis");
}

// Runs Arnoldi steps j0 .. m-1 on (V, H); V(:, 0..j0) must be orthonormal.
// Returns the number of steps done.
Index arnoldi_steps(const LinearOperator<Complex>& op, CMatrix& v, CMatrix& h, Index j0, Index m, Fabric* fabric,
                    bool continue_on_breakdown, bool& breakdown) {
  const Index s = v.rows();
  breakdown = false;
  for (Index j = j0; j < m; ++j) {
    Vector<Complex> x(v.col(j).begin(), v.col(j).end());
    Vector<Complex> w = op(x);
    require_same_size(w.size(), static_cast<std::size_t>(s), "arnoldi operator");
    const Orth o = orthogonalize(v, j + 1, w, fabric);
    for (Index i = 0; i <= j; ++i) h(i, j) = o.h[i];
    if (o.beta <= kBreakdown * o.w0norm || o.beta == 0) {
      h(j + 1, j) = 0;
      if (j + 1 == s || !continue_on_breakdown) {
        breakdown = true;
        return j + 1;
      }
      const Vector<Complex> f = fresh_direction(v, j + 1, fabric);
      std::copy(f.begin(), f.end(), v.col(j + 1).begin());
      continue;
    }
    h(j + 1, j) = o.beta;
    for (Index r = 0; r < s; ++r) v(r, j + 1) = w[r] / o.beta;
  }
  return m;
}

}  // namespace

ArnoldiResult arnoldi(const LinearOperator<Complex>& op, Index s, Index m, std::span<const Complex> v0,
                      Fabric* fabric) {
  require_same_size(v0.size(), static_cast<std::size_t>(s), "arnoldi start vector");
  if (m < 1 || m > s) throw std::invalid_argument("arnoldi: need 1 <= m <= s");
  const Real nv = norm2(v0);
  if (nv == 0) throw std::invalid_argument("arnoldi: zero start vector");
  CMatrix v(s, m + 1), h(m + 1, m);
  for (Index r = 0; r < s; ++r) v(r, 0) = v0[r] / nv;
  bool breakdown = false;
  const Index done = arnoldi_steps(op, v, h, 0, m, fabric, false, breakdown);
  ArnoldiResult ar;
  ar.breakdown = breakdown;
  ar.V = v.block(0, 0, s, done + 1);
  ar.H = h.block(0, 0, done + 1, done);
  ar.beta = std::abs(ar.H(done, done - 1));
  return ar;
}

std::vector<Complex> SchurForm::eigenvalues() const {
  std::vector<Complex> e(T.rows());
  for (Index i = 0; i < T.rows(); ++i) e[i] = T(i, i);
  return e;
}

HessenbergForm hessenberg_reduce(CMatrix a) {
  const Index n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("hessenberg_reduce: matrix not square");
  CMatrix q = CMatrix::identity(n);
  Vector<Complex> u(n);
  for (Index j = 0; j + 2 < n; ++j) {
    Real xnorm = 0;
    for (Index i = j + 1; i < n; ++i) xnorm += abs2(a(i, j));
    xnorm = std::sqrt(xnorm);
    Real tail = 0;
    for (Index i = j + 2; i < n; ++i) tail += abs2(a(i, j));
    if (tail == 0) continue;
    const Complex x0 = a(j + 1, j);
    const Complex phase = std::abs(x0) == 0 ? Complex(1) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    std::fill(u.begin(), u.end(), Complex(0));
    for (Index i = j + 1; i < n; ++i) u[i] = a(i, j);
    u[j + 1] -= alpha;
    const Real un = norm2(u);
    for (auto& x : u) x /= un;
    // A <- (I - 2uu^H) A (I - 2uu^H), Q <- Q (I - 2uu^H)
    for (Index c = 0; c < n; ++c) {
      Complex d = 0;
      for (Index i = j + 1; i < n; ++i) d += std::conj(u[i]) * a(i, c);
      for (Index i = j + 1; i < n; ++i) a(i, c) -= 2.0 * u[i] * d;
    }
    for (Index r = 0; r < n; ++r) {
      Complex d = 0;
      for (Index i = j + 1; i < n; ++i) d += a(r, i) * u[i];
      for (Index i = j + 1; i < n; ++i) a(r, i) -= 2.0 * d * std::conj(u[i]);
    }
    for (Index r = 0; r < n; ++r) {
      Complex d = 0;
      for (Index i = j + 1; i < n; ++i) d += q(r, i) * u[i];
      for (Index i = j + 1; i < n; ++i) q(r, i) -= 2.0 * d * std::conj(u[i]);
    }
    for (Index i = j + 2; i < n; ++i) a(i, j) = 0;
  }
  return {std::move(q), std::move(a)};
}

SchurForm hessenberg_schur(const CMatrix& h) {
  const Index n = h.rows();
  if (h.cols() != n) throw DimensionMismatch("hessenberg_schur: matrix not square");
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 2; i < n; ++i)
      if (h(i, j) != Complex(0)) throw std::invalid_argument("hessenberg_schur: input is not Hessenberg");
  SchurForm sf{CMatrix::identity(n), h};
  CMatrix& t = sf.T;
  const Real hnorm = frobenius_norm(h);
  const Index max_sweeps = 100 * std::max<Index>(n, 1);
  Index sweeps = 0, since_deflation = 0;
  std::vector<Rotation> rot(n);
  Index hi = n - 1;
  while (hi > 0) {
    Index lo = hi;
    while (lo > 0) {
      Real scale = std::abs(t(lo - 1, lo - 1)) + std::abs(t(lo, lo));
      if (scale == 0) scale = hnorm;
      if (std::abs(t(lo, lo - 1)) <= kDeflate * scale) {
        t(lo, lo - 1) = 0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++sweeps > max_sweeps) throw NumericalError("hessenberg_schur: QR iteration did not converge");
    ++since_deflation;
    Complex mu = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
    if (since_deflation % 11 == 10) mu = t(hi, hi) + Complex(0.75 * std::abs(t(hi, hi - 1)), 0.5 * std::abs(t(hi, hi - 1)));
    for (Index i = lo; i <= hi; ++i) t(i, i) -= mu;
    for (Index k = lo; k < hi; ++k) {
      rot[k] = make_rotation(t(k, k), t(k + 1, k));
      rotate_rows(t, k, k + 1, rot[k], k, n);
      t(k + 1, k) = 0;
    }
    for (Index k = lo; k < hi; ++k) {
      rotate_cols(t, k, k + 1, rot[k], 0, std::min(k + 2, hi) + 1);
      rotate_cols(sf.Q, k, k + 1, rot[k], 0, n);
    }
    for (Index i = lo; i <= hi; ++i) t(i, i) += mu;
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) t(i, j) = 0;
  return sf;
}

SchurForm schur(const CMatrix& a) {
  HessenbergForm hf = hessenberg_reduce(a);
  SchurForm sf = hessenberg_schur(hf.H);
  sf.Q = matmul(hf.Q, sf.Q);
  return sf;
}

void swap_schur(SchurForm& sf, Index k) {
  CMatrix& t = sf.T;
  const Index n = t.rows();
  if (k < 0 || k + 1 >= n) throw std::out_of_range("swap_schur: index out of range");
  const Complex t11 = t(k, k), t22 = t(k + 1, k + 1);
  if (t11 == t22) return;
  const Rotation g = make_rotation(t(k, k + 1), t22 - t11);
  rotate_rows(t, k, k + 1, g, k, n);
  rotate_cols(t, k, k + 1, g, 0, k + 2);
  rotate_cols(sf.Q, k, k + 1, g, 0, n);
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  t(k + 1, k) = 0;
}

Real correction_weight(Complex gamma) {
  const Real d = std::abs(Complex(1) - gamma);
  return d == 0 ? std::numeric_limits<Real>::infinity() : std::abs(gamma) / d;
}

void sort_schur(SchurForm& sf, Index count) {
  const Index n = sf.T.rows();
  count = std::min(count, n);
  for (Index i = 0; i < count; ++i) {
    Index best = i;
    Real wbest = correction_weight(sf.T(i, i));
    for (Index j = i + 1; j < n; ++j) {
      const Real w = correction_weight(sf.T(j, j));
      if (w > wbest) {
        wbest = w;
        best = j;
      }
    }
    for (Index j = best; j > i; --j) swap_schur(sf, j - 1);
  }
}

std::vector<Complex> LowRankTerm::eigenvalues() const {
  std::vector<Complex> e(R.rows());
  for (Index i = 0; i < R.rows(); ++i) e[i] = R(i, i);
  return e;
}

LowRankTerm zero_term(Index s) { return {CMatrix(s, 0), CMatrix(0, 0)}; }

namespace {

void check_selected(const CMatrix& r) {
  for (Index i = 0; i < r.rows(); ++i)
    if (std::abs(Complex(1) - r(i, i)) < 1e-12)
      throw NumericalError("low-rank correction is singular: eigenvalue " + std::to_string(i) + " equals 1");
}

LowRankTerm truncate(const CMatrix& basis, const SchurForm& sf, Index k) {
  LowRankTerm t;
  t.W = matmul(basis, sf.Q.block(0, 0, sf.Q.rows(), k));
  t.R = sf.T.block(0, 0, k, k);
  check_selected(t.R);
  return t;
}

}  // namespace

LowRankTerm select_rank_k(const ArnoldiResult& ar, SchurForm sf, Index k) {
  const Index m = ar.steps();
  if (k < 0 || k > m) throw std::invalid_argument("select_rank_k: need 0 <= k <= m");
  if (sf.T.rows() != m) throw DimensionMismatch("select_rank_k: Schur form does not match H_m");
  if (k == 0) return zero_term(ar.V.rows());
  sort_schur(sf, k);
  return truncate(ar.V.block(0, 0, ar.V.rows(), m), sf, k);
}

Vector<Complex> apply_correction(const LowRankTerm& t, std::span<const Complex> z, Fabric* fabric) {
  require_same_size(z.size(), static_cast<std::size_t>(t.size()), "apply_correction");
  const Index k = t.rank();
  Vector<Complex> out(z.size(), Complex(0));
  if (k == 0) return out;
  Vector<Complex> y = adjoint_matvec(t.W, z);
  if (fabric) fabric->record_allreduce(k);
  // (I - R) u = y, then [(I - R)^{-1} - I] y = u - y
  CMatrix imr(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i <= j; ++i) imr(i, j) = (i == j ? Complex(1) : Complex(0)) - t.R(i, j);
  Vector<Complex> u(y);
  upper_solve_inplace<Complex>(imr, u);
  for (Index i = 0; i < k; ++i) u[i] -= y[i];
  return matvec<Complex>(t.W, u);
}

SchurVectorsResult restarted_schur_vectors(const LinearOperator<Complex>& op, Index s, Index k, int max_cycles,
                                           Fabric* fabric) {
  if (k < 1) throw std::invalid_argument("restarted_schur_vectors: k must be >= 1");
  if (max_cycles < 1) throw std::invalid_argument("restarted_schur_vectors: max_cycles must be >= 1");
  if (s < 1) throw std::invalid_argument("restarted_schur_vectors: empty operator");
  k = std::min(k, s);
  const Index m = std::min(2 * k, s);

  CMatrix v(s, m + 1), h(m + 1, m);
  const Real inv = 1.0 / std::sqrt(static_cast<Real>(s));
  for (Index r = 0; r < s; ++r) v(r, 0) = inv;

  SchurVectorsResult res;
  std::vector<Complex> previous;
  Index start = 0;
  while (true) {
    bool breakdown = false;
    arnoldi_steps(op, v, h, start, m, fabric, true, breakdown);
    res.steps += m - start;
    ++res.cycles;

    const CMatrix hm = h.block(0, 0, m, m);
    const Real beta = std::abs(h(m, m - 1));
    SchurForm sf = start == 0 ? hessenberg_schur(hm) : schur(hm);
    sort_schur(sf, k);

    std::vector<Complex> current(k);
    for (Index i = 0; i < k; ++i) current[i] = sf.T(i, i);
    bool converged = breakdown || beta <= kBreakdown * std::max(frobenius_norm(hm), 1e-300);
    if (!converged && !previous.empty()) {
      converged = true;
      for (Index i = 0; i < k; ++i)
        if (std::abs(current[i] - previous[i]) > 1e-2 * std::abs(current[i])) converged = false;
    }
    if (converged || res.cycles >= max_cycles || m == k) {
      res.converged = converged;
      res.term = truncate(v.block(0, 0, s, m), sf, k);
      return res;
    }
    previous = std::move(current);

    // Krylov-Schur restart: keep k Schur vectors plus the residual direction.
    const CMatrix kept = matmul(v.block(0, 0, s, m), sf.Q.block(0, 0, m, k));
    CMatrix vn(s, m + 1), hn(m + 1, m);
    for (Index j = 0; j < k; ++j)
      for (Index r = 0; r < s; ++r) vn(r, j) = kept(r, j);
    for (Index r = 0; r < s; ++r) vn(r, k) = v(r, m);
    for (Index j = 0; j < k; ++j) {
      for (Index i = 0; i <= j; ++i) hn(i, j) = sf.T(i, j);
      hn(k, j) = h(m, m - 1) * sf.Q(m - 1, j);
    }
    v = std::move(vn);
    h = std::move(hn);
    start = k;
  }
}

void write_eigenvalues_csv(std::ostream& out, std::span<const Complex> eigenvalues) {
  out << "index,real,imag,weight\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    out << i << ',' << eigenvalues[i].real() << ',' << eigenvalues[i].imag() << ','
        << correction_weight(eigenvalues[i]) << '\n';
  out.precision(old);
}

}  // namespace schurlr
