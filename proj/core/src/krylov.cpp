#include "schurlr/krylov.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "schurlr/dense.hpp"

namespace schurlr {

void KrylovParams::validate() const {
  if (restart < 1) throw std::invalid_argument("krylov: restart must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("krylov: tol must be > 0");
  if (maxit < 0) throw std::invalid_argument("krylov: maxit must be >= 0");
}

namespace {

template <Scalar T>
struct Givens {
  Real c = 1;
  T s = T(0);
};

// [c s; -conj(s) c] [f; g] = [r; 0], c real.
template <Scalar T>
Givens<T> make_givens(T f, T g) {
  const Real af = std::abs(f), ag = std::abs(g);
  if (ag == 0) return {1.0, T(0)};
  const Real r = std::hypot(af, ag);
  const T phase = af == 0 ? T(1) : f / af;
  return {af / r, phase * conj(g) / r};
}

template <Scalar T>
Real norm_counted(std::span<const T> x, Fabric* fabric) {
  if (fabric) fabric->record_allreduce(1);
  return norm2(x);
}

template <Scalar T>
Vector<T> residual(const LinearOperator<T>& a, std::span<const T> b, const Vector<T>& x) {
  Vector<T> ax = a(x);
  require_same_size(ax.size(), b.size(), "krylov operator");
  Vector<T> r(b.begin(), b.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
  return r;
}

template <Scalar T>
KrylovResult<T> restarted_gmres(const LinearOperator<T>& a, const LinearOperator<T>& precond,
                                std::span<const T> b, const KrylovParams& params, std::span<const T> x0,
                                Fabric* fabric, bool flexible) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  KrylovResult<T> res;
  auto& st = res.stats;
  if (!x0.empty()) require_same_size(x0.size(), n, "krylov x0");
  res.x = x0.empty() ? Vector<T>(n, T(0)) : Vector<T>(x0.begin(), x0.end());

  const Real bnorm = norm_counted<T>(b, fabric);
  if (bnorm == 0) {
    std::fill(res.x.begin(), res.x.end(), T(0));
    st.converged = true;
    st.history.push_back(0.0);
    return res;
  }
  auto apply_m = [&](const Vector<T>& v) { return precond ? precond(v) : v; };

  Vector<T> r = residual(a, b, res.x);
  Real beta = norm_counted<T>(r, fabric);
  st.history.push_back(beta / bnorm);
  const Index m = params.restart;

  while (beta / bnorm > params.tol && st.iterations < params.maxit) {
    std::vector<Vector<T>> v{r}, z;
    scale<T>(T(1.0 / beta), v[0]);
    DenseMatrix<T> h(m + 1, m);
    std::vector<Givens<T>> rot(m);
    Vector<T> g(m + 1, T(0));
    g[0] = beta;
    Index j = 0;
    Real estimate = beta;
    while (j < m && st.iterations < params.maxit) {
      Vector<T> zj = apply_m(v[j]);
      Vector<T> w = a(zj);
      if (flexible) z.push_back(std::move(zj));
      // modified Gram-Schmidt
      for (Index i = 0; i <= j; ++i) {
        h(i, j) = dot<T>(v[i], w);
        if (fabric) fabric->record_allreduce(1);
        axpy_inplace<T>(-h(i, j), v[i], w);
      }
      const Real hn = norm_counted<T>(w, fabric);
      for (Index i = 0; i < j; ++i) {
        const T x = h(i, j), y = h(i + 1, j);
        h(i, j) = rot[i].c * x + rot[i].s * y;
        h(i + 1, j) = -conj(rot[i].s) * x + rot[i].c * y;
      }
      rot[j] = make_givens<T>(h(j, j), T(hn));
      h(j, j) = rot[j].c * h(j, j) + rot[j].s * T(hn);
      g[j + 1] = -conj(rot[j].s) * g[j];
      g[j] = rot[j].c * g[j];
      ++j;
      ++st.iterations;
      estimate = std::abs(g[j]);
      st.history.push_back(estimate / bnorm);
      if (hn == 0 || estimate / bnorm <= params.tol) break;
      v.push_back(w);
      scale<T>(T(1.0 / hn), v.back());
    }
    // y = H(0:j, 0:j)^{-1} g(0:j)
    DenseMatrix<T> hj = h.block(0, 0, j, j);
    Vector<T> y(g.begin(), g.begin() + j);
    upper_solve_inplace<T>(hj, y);
    if (flexible) {
      for (Index i = 0; i < j; ++i) axpy_inplace<T>(y[i], z[i], res.x);
    } else {
      Vector<T> vy(n, T(0));
      for (Index i = 0; i < j; ++i) axpy_inplace<T>(y[i], v[i], vy);
      const Vector<T> u = apply_m(vy);
      axpy_inplace<T>(T(1), u, res.x);
    }
    r = residual(a, b, res.x);
    beta = norm_counted<T>(r, fabric);
    st.restart_checks.emplace_back(estimate / bnorm, beta / bnorm);
  }
  st.relative_residual = beta / bnorm;
  st.converged = st.relative_residual <= params.tol;
  st.iteration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

template <Scalar T>
KrylovResult<T> fgmres(const LinearOperator<T>& a, const LinearOperator<T>& precond, std::span<const T> b,
                       const KrylovParams& params, std::span<const T> x0, Fabric* fabric) {
  return restarted_gmres<T>(a, precond, b, params, x0, fabric, true);
}

template <Scalar T>
KrylovResult<T> gmres_right(const LinearOperator<T>& a, const LinearOperator<T>& precond, std::span<const T> b,
                            const KrylovParams& params, std::span<const T> x0, Fabric* fabric) {
  return restarted_gmres<T>(a, precond, b, params, x0, fabric, false);
}

void write_history_csv(std::ostream& out, const SolveStats& stats) {
  out << "iteration,relative_residual\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < stats.history.size(); ++i) out << i << ',' << stats.history[i] << '\n';
  out.precision(old);
}

#define SCHURLR_INSTANTIATE(T)                                                                          \
  template KrylovResult<T> fgmres<T>(const LinearOperator<T>&, const LinearOperator<T>&,                 \
                                     std::span<const T>, const KrylovParams&, std::span<const T>, Fabric*); \
  template KrylovResult<T> gmres_right<T>(const LinearOperator<T>&, const LinearOperator<T>&,            \
                                          std::span<const T>, const KrylovParams&, std::span<const T>,   \
                                          Fabric*);
SCHURLR_INSTANTIATE(Real)
SCHURLR_INSTANTIATE(Complex)
#undef SCHURLR_INSTANTIATE

}  // namespace schurlr
