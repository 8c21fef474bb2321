#include "schurlr/ilut.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace schurlr {

template <Scalar T>
T ilut_shift(const CsrMatrix<T>& a, Real shift_factor) {
  if (shift_factor == 0.0 || a.rows() == 0) return T(0);
  if constexpr (!is_complex_v<T>) {
    throw std::invalid_argument("ilut: complex shift requested for a real matrix");
  } else {
    Real s = 0;
    for (Index i = 0; i < a.rows(); ++i) s += std::abs(a.at(i, i));
    return Complex(0.0, shift_factor * s / static_cast<Real>(a.rows()));
  }
}

namespace {

template <Scalar T>
struct Entry {
  Index col;
  T val;
};

// Keeps the `keep` largest entries by magnitude (lower column on ties),
// sorted by column afterwards.
template <Scalar T>
void keep_largest(std::vector<Entry<T>>& e, Index keep) {
  if (static_cast<Index>(e.size()) > keep) {
    auto larger = [](const Entry<T>& x, const Entry<T>& y) {
      const Real ax = std::abs(x.val), ay = std::abs(y.val);
      return ax != ay ? ax > ay : x.col < y.col;
    };
    std::nth_element(e.begin(), e.begin() + keep, e.end(), larger);
    e.resize(keep);
  }
  std::sort(e.begin(), e.end(), [](const Entry<T>& x, const Entry<T>& y) { return x.col < y.col; });
}

}  // namespace

template <Scalar T>
IlutFactors<T> ilut(const CsrMatrix<T>& a, Real tau, Index lfil, Real shift_factor) {
  if (a.rows() != a.cols()) throw DimensionMismatch("ilut: matrix not square");
  if (tau < 0) throw std::invalid_argument("ilut: tau must be >= 0");
  if (lfil < 1) throw std::invalid_argument("ilut: lfil must be >= 1");
  const Index n = a.rows();
  const T eta = ilut_shift(a, shift_factor);

  std::vector<Index> lptr{0}, lcol, uptr{0}, ucol;
  std::vector<T> lval, uval;

  std::vector<T> w(n, T(0));
  std::vector<char> used(n, 0);
  std::vector<Index> pattern;
  std::priority_queue<Index, std::vector<Index>, std::greater<>> lower;
  std::vector<Entry<T>> lrow, urow;

  for (Index i = 0; i < n; ++i) {
    pattern.clear();
    Real rnorm = 0;
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index j = cols[k];
      w[j] = vals[k];
      used[j] = 1;
      pattern.push_back(j);
      rnorm += abs2(vals[k]);
      if (j < i) lower.push(j);
    }
    if (!used[i]) {
      used[i] = 1;
      pattern.push_back(i);
    }
    w[i] += eta;
    const Real tol = tau * std::sqrt(rnorm);

    while (!lower.empty()) {
      const Index k = lower.top();
      lower.pop();
      const T mult = w[k] / uval[uptr[k]];
      if (std::abs(mult) < tol) {
        w[k] = T(0);
        continue;
      }
      w[k] = mult;
      for (Index q = uptr[k] + 1; q < uptr[k + 1]; ++q) {
        const Index j = ucol[q];
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(j);
          if (j < i) lower.push(j);
        }
        w[j] -= mult * uval[q];
      }
    }

    const T diag = w[i];
    lrow.clear();
    urow.clear();
    for (Index j : pattern) {
      const T v = w[j];
      w[j] = T(0);
      used[j] = 0;
      if (j == i || v == T(0) || std::abs(v) < tol) continue;
      (j < i ? lrow : urow).push_back({j, v});
    }
    if (diag == T(0)) throw ZeroPivotError(i);
    keep_largest(lrow, lfil);
    keep_largest(urow, lfil);
    for (const auto& e : lrow) {
      lcol.push_back(e.col);
      lval.push_back(e.val);
    }
    lptr.push_back(static_cast<Index>(lcol.size()));
    ucol.push_back(i);
    uval.push_back(diag);
    for (const auto& e : urow) {
      ucol.push_back(e.col);
      uval.push_back(e.val);
    }
    uptr.push_back(static_cast<Index>(ucol.size()));
  }

  IlutFactors<T> f;
  f.L = CsrMatrix<T>(n, n, std::move(lptr), std::move(lcol), std::move(lval));
  f.U = CsrMatrix<T>(n, n, std::move(uptr), std::move(ucol), std::move(uval));
  f.tau = tau;
  f.lfil = lfil;
  f.shift = eta;
  return f;
}

template <Scalar T>
void lu_solve_inplace(const IlutFactors<T>& f, std::span<T> x) {
  require_same_size(x.size(), static_cast<std::size_t>(f.size()), "lu_solve");
  const Index n = f.size();
  const auto lp = f.L.row_ptr();
  const auto lc = f.L.col_idx();
  const auto lv = f.L.values();
  for (Index i = 0; i < n; ++i) {
    T s = x[i];
    for (Index q = lp[i]; q < lp[i + 1]; ++q) s -= lv[q] * x[lc[q]];
    x[i] = s;
  }
  const auto up = f.U.row_ptr();
  const auto uc = f.U.col_idx();
  const auto uv = f.U.values();
  for (Index i = n - 1; i >= 0; --i) {
    T s = x[i];
    // U rows are canonical, so the diagonal is the first stored entry
    for (Index q = up[i] + 1; q < up[i + 1]; ++q) s -= uv[q] * x[uc[q]];
    x[i] = s / uv[up[i]];
  }
}

template <Scalar T>
Vector<T> lu_solve(const IlutFactors<T>& f, std::span<const T> b) {
  Vector<T> x(b.begin(), b.end());
  lu_solve_inplace<T>(f, x);
  return x;
}

template <Scalar T>
CsrMatrix<T> lu_product(const IlutFactors<T>& f) {
  const Index n = f.size();
  std::vector<Triplet<T>> t;
  for (Index i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < f.U.row_cols(i).size(); ++q)
      t.push_back({i, f.U.row_cols(i)[q], f.U.row_values(i)[q]});
    const auto lc = f.L.row_cols(i);
    const auto lv = f.L.row_values(i);
    for (std::size_t p = 0; p < lc.size(); ++p) {
      const auto uc = f.U.row_cols(lc[p]);
      const auto uv = f.U.row_values(lc[p]);
      for (std::size_t q = 0; q < uc.size(); ++q) t.push_back({i, uc[q], lv[p] * uv[q]});
    }
  }
  return CsrMatrix<T>::from_triplets(n, n, t);
}

template <Scalar T>
Real pivot_ratio(const IlutFactors<T>& f) {
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0;
  for (Index i = 0; i < f.size(); ++i) {
    const Real d = std::abs(f.U.row_values(i)[0]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return f.size() == 0 ? 1.0 : hi / lo;
}

#define SCHURLR_INSTANTIATE(T)                                                       \
  template T ilut_shift<T>(const CsrMatrix<T>&, Real);                               \
  template IlutFactors<T> ilut<T>(const CsrMatrix<T>&, Real, Index, Real);           \
  template void lu_solve_inplace<T>(const IlutFactors<T>&, std::span<T>);            \
  template Vector<T> lu_solve<T>(const IlutFactors<T>&, std::span<const T>);         \
  template CsrMatrix<T> lu_product<T>(const IlutFactors<T>&);                        \
  template Real pivot_ratio<T>(const IlutFactors<T>&);
SCHURLR_INSTANTIATE(Real)
SCHURLR_INSTANTIATE(Complex)
#undef SCHURLR_INSTANTIATE

}  // namespace schurlr
