#include "schurlr/shifts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "schurlr/ilut.hpp"

namespace schurlr {

ShiftSet ShiftSet::from_poles(std::vector<Complex> sigmas) {
  ShiftSet ss;
  for (const Complex& s : sigmas) {
    if (s.imag() == 0) throw std::invalid_argument("shifts: pole on the real axis");
    ss.radius = std::max(ss.radius, std::abs(s));
  }
  ss.sigmas = std::move(sigmas);
  ss.conjugate_symmetric = true;
  for (Index j = 0; j < ss.size(); ++j)
    if (ss.conjugate_of(j) < 0) ss.conjugate_symmetric = false;
  return ss;
}

Index ShiftSet::conjugate_of(Index j) const {
  const Complex c = std::conj(sigmas.at(static_cast<std::size_t>(j)));
  const Real tol = 1e-14 * std::max<Real>(1.0, std::abs(c));
  for (Index i = 0; i < size(); ++i)
    if (std::abs(sigmas[i] - c) <= tol) return i;
  return -1;
}

ShiftSet circle_poles(int k, Real r) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("circle_poles: k must be even and positive");
  if (!(r > 0)) throw std::invalid_argument("circle_poles: r must be > 0");
  std::vector<Complex> s;
  for (int j = 1; j <= k; ++j) s.push_back(std::polar(r, std::numbers::pi * (2 * j - 1) / k));
  ShiftSet ss = ShiftSet::from_poles(std::move(s));
  ss.radius = r;
  return ss;
}

Real WeightFunction::operator()(Real t) const {
  if (t < a || t > b) return 0.0;
  for (const Piece& p : pieces)
    if (t >= p.lo && t <= p.hi) return p.value;
  return base;
}

std::vector<Real> WeightFunction::breakpoints() const {
  std::vector<Real> pts{a, b};
  for (const Piece& p : pieces)
    for (Real x : {p.lo, p.hi})
      if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace {

constexpr int kGaussPoints = 16;

struct GaussRule {
  std::array<Real, kGaussPoints> x{}, w{};
};

// Legendre roots by Newton iteration from the Chebyshev guess.
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule g;
    const int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
      Real x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      Real dp = 0;
      for (int it = 0; it < 100; ++it) {
        Real p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const Real dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      g.x[i] = x;
      g.w[i] = 2 / ((1 - x * x) * dp * dp);
    }
    return g;
  }();
  return rule;
}

CMatrix gauss_panel(const std::vector<Complex>& sigmas, Real lo, Real hi, Real weight) {
  const Index k = static_cast<Index>(sigmas.size());
  CMatrix out(k, k);
  const GaussRule& g = gauss_rule();
  const Real half = (hi - lo) / 2, mid = (hi + lo) / 2;
  std::vector<Complex> phi(k);
  for (int q = 0; q < kGaussPoints; ++q) {
    const Real t = mid + half * g.x[q];
    for (Index j = 0; j < k; ++j) phi[j] = sigmas[j] / (t - sigmas[j]);
    const Real wq = g.w[q] * half * weight;
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < k; ++i) out(i, j) += wq * std::conj(phi[i]) * phi[j];
  }
  return out;
}

Real max_abs_diff(const CMatrix& x, const CMatrix& y) {
  Real d = 0;
  for (std::size_t i = 0; i < x.data().size(); ++i) d = std::max(d, std::abs(x.data()[i] - y.data()[i]));
  return d;
}

void add_into(CMatrix& acc, const CMatrix& x) {
  for (std::size_t i = 0; i < x.data().size(); ++i) acc.data()[i] += x.data()[i];
}

CMatrix adaptive(const std::vector<Complex>& sigmas, Real lo, Real hi, Real weight, Real tol, const CMatrix& whole,
                 int depth) {
  const Real mid = (lo + hi) / 2;
  CMatrix left = gauss_panel(sigmas, lo, mid, weight);
  const CMatrix right = gauss_panel(sigmas, mid, hi, weight);
  CMatrix both = left;
  add_into(both, right);
  if (max_abs_diff(both, whole) <= tol || depth >= 50) return both;
  CMatrix out = adaptive(sigmas, lo, mid, weight, tol / 2, left, depth + 1);
  add_into(out, adaptive(sigmas, mid, hi, weight, tol / 2, right, depth + 1));
  return out;
}

}  // namespace

CMatrix grammian(const ShiftSet& ss, const WeightFunction& w, Real abs_tol) {
  if (!(w.a < w.b)) throw std::invalid_argument("grammian: need a < b");
  if (ss.size() == 0) throw std::invalid_argument("grammian: empty pole set");
  for (const Complex& s : ss.sigmas)
    if (s.imag() == 0 && s.real() >= w.a && s.real() <= w.b)
      throw NumericalError("grammian: pole on the integration interval");
  const Index k = ss.size();
  CMatrix g(k, k);
  const std::vector<Real> pts = w.breakpoints();
  const Real len = w.b - w.a;
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const Real lo = pts[p], hi = pts[p + 1];
    const Real weight = w((lo + hi) / 2);
    if (weight == 0) continue;
    const Real tol = abs_tol * (hi - lo) / len;
    add_into(g, adaptive(ss.sigmas, lo, hi, weight, tol, gauss_panel(ss.sigmas, lo, hi, weight), 0));
  }
  // exact Hermitian symmetry
  for (Index j = 0; j < k; ++j) {
    g(j, j) = g(j, j).real();
    for (Index i = j + 1; i < k; ++i) {
      const Complex avg = (g(i, j) + std::conj(g(j, i))) / 2.0;
      g(i, j) = avg;
      g(j, i) = std::conj(avg);
    }
  }
  return g;
}

Real qp_objective(const CMatrix& gamma, std::span<const Complex> a) {
  const Vector<Complex> ga = matvec(gamma, a);
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * ga[i];
  return s.real();
}

QpSolution solve_qp(const CMatrix& gamma) {
  const Index k = gamma.rows();
  if (k < 1 || gamma.cols() != k) throw DimensionMismatch("solve_qp: Grammian must be square and non-empty");
  CMatrix kkt(k + 1, k + 1);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < k; ++i) kkt(i, j) = gamma(i, j);
    kkt(j, k) = 1.0;
    kkt(k, j) = 1.0;
  }
  Vector<Complex> rhs(k + 1, 0.0);
  rhs[k] = 1.0;
  const Vector<Complex> sol = DenseLu<Complex>(kkt).solve(rhs);
  QpSolution q;
  q.alphas.assign(sol.begin(), sol.begin() + k);
  q.multiplier = sol[k];
  const Vector<Complex> res = matvec(kkt, std::span<const Complex>(sol));
  for (Index i = 0; i <= k; ++i) q.kkt_residual = std::max(q.kkt_residual, std::abs(res[i] - rhs[i]));
  q.objective = qp_objective(gamma, q.alphas);
  return q;
}

ShiftDesign design_shifts(const ShiftSet& ss, const WeightFunction& w) {
  ShiftDesign d;
  d.poles = ss;
  d.weight = w;
  d.gamma = grammian(ss, w);
  QpSolution q = solve_qp(d.gamma);
  d.alphas = std::move(q.alphas);
  d.multiplier = q.multiplier;
  d.objective = q.objective;
  d.kkt_residual = q.kkt_residual;
  return d;
}

ShiftDesign uniform_design(const ShiftSet& ss, const WeightFunction& w) {
  ShiftDesign d;
  d.poles = ss;
  d.weight = w;
  d.gamma = grammian(ss, w);
  d.alphas.assign(ss.sigmas.size(), Complex(1.0 / static_cast<Real>(ss.size())));
  d.objective = qp_objective(d.gamma, d.alphas);
  return d;
}

struct ShiftedSolver::Entry {
  Complex sigma;
  std::unique_ptr<DenseLu<Complex>> lu;
  IlutFactors<Complex> ilu;
};

ShiftedSolver ShiftedSolver::dense(const CsrMatrix<Real>& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("ShiftedSolver: matrix not square");
  ShiftedSolver s;
  s.a_ = convert<Complex>(a);
  return s;
}

ShiftedSolver ShiftedSolver::ilut(const CsrMatrix<Real>& a, Real tau, Index lfil) {
  ShiftedSolver s = dense(a);
  s.kind_ = Kind::Ilut;
  s.tau_ = tau;
  s.lfil_ = lfil;
  return s;
}

Vector<Complex> ShiftedSolver::solve(Complex sigma, std::span<const Complex> r) {
  require_same_size(r.size(), static_cast<std::size_t>(a_.rows()), "shifted solve");
  auto it = std::find_if(cache_.begin(), cache_.end(), [&](const auto& e) { return e->sigma == sigma; });
  if (it == cache_.end()) {
    auto e = std::make_shared<Entry>();
    e->sigma = sigma;
    const Index n = a_.rows();
    std::vector<Triplet<Complex>> t;
    for (Index i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < a_.row_cols(i).size(); ++q) t.push_back({i, a_.row_cols(i)[q], a_.row_values(i)[q]});
      t.push_back({i, i, -sigma});
    }
    const auto shifted = CsrMatrix<Complex>::from_triplets(n, n, t);
    if (kind_ == Kind::Dense) {
      CMatrix d(n, n);
      for (const auto& tr : t) d(tr.row, tr.col) += tr.value;
      e->lu = std::make_unique<DenseLu<Complex>>(std::move(d));
    } else {
      e->ilu = schurlr::ilut(shifted, tau_, lfil_);
    }
    cache_.push_back(std::move(e));
    it = cache_.end() - 1;
  }
  ++solves_;
  return (*it)->lu ? (*it)->lu->solve(r) : lu_solve((*it)->ilu, r);
}

Vector<Complex> apply_combined(const ShiftDesign& design, const ShiftedSolve& solve, std::span<const Complex> r,
                               bool real_operator) {
  const ShiftSet& ss = design.poles;
  require_same_size(design.alphas.size(), ss.sigmas.size(), "apply_combined weights");
  const bool real_r = std::all_of(r.begin(), r.end(), [](const Complex& v) { return v.imag() == 0; });
  const bool pair = real_operator && real_r && ss.conjugate_symmetric;
  Vector<Complex> out(r.size(), 0.0);
  std::vector<bool> done(ss.sigmas.size(), false);
  for (Index j = 0; j < ss.size(); ++j) {
    if (done[j]) continue;
    const Vector<Complex> v = solve(ss.sigmas[j], r);
    require_same_size(v.size(), r.size(), "shifted solve result");
    axpy_inplace<Complex>(design.alphas[j], v, out);
    done[j] = true;
    if (!pair) continue;
    const Index c = ss.conjugate_of(j);
    if (c < 0 || done[c]) continue;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += design.alphas[c] * std::conj(v[i]);
    done[c] = true;
  }
  return out;
}

RichardsonResult richardson_compound(const LinearOperator<Complex>& a, const ShiftSet& ss,
                                     const ShiftedSolve& solve, std::span<const Complex> b,
                                     std::span<const Complex> x0) {
  RichardsonResult res;
  res.x = x0.empty() ? Vector<Complex>(b.size(), 0.0) : Vector<Complex>(x0.begin(), x0.end());
  require_same_size(res.x.size(), b.size(), "richardson x0");
  res.r.assign(b.begin(), b.end());
  const Vector<Complex> ax = a(res.x);
  for (std::size_t i = 0; i < ax.size(); ++i) res.r[i] -= ax[i];
  res.residual_norms.push_back(norm2(res.r));
  for (const Complex& s : ss.sigmas) {
    const Vector<Complex> delta = solve(s, res.r);
    const Vector<Complex> ad = a(delta);
    axpy_inplace<Complex>(1.0, delta, res.x);
    axpy_inplace<Complex>(-1.0, ad, res.r);
    res.residual_norms.push_back(norm2(res.r));
  }
  return res;
}

Vector<Real> conjugate_pair_step(const ShiftedSolve& solve, Complex sigma, std::span<const Real> r0,
                                 std::span<const Real> x0) {
  if (sigma.imag() == 0) throw std::invalid_argument("conjugate_pair_step: sigma must not be real");
  require_same_size(r0.size(), x0.size(), "conjugate_pair_step");
  const Vector<Complex> rc(r0.begin(), r0.end());
  const Vector<Complex> v = solve(sigma, rc);
  const Real ratio = sigma.real() / sigma.imag();
  Vector<Real> x2(x0.begin(), x0.end());
  for (std::size_t i = 0; i < x2.size(); ++i) x2[i] += v[i].real() - ratio * v[i].imag();
  return x2;
}

namespace {
void require_not_pole(const std::vector<Complex>& sigmas, Complex lambda) {
  for (const Complex& s : sigmas)
    if (lambda == s) throw std::invalid_argument("rho_eval: lambda equals a pole");
}
}  // namespace

Complex rho_eval(const ShiftDesign& design, Complex lambda) {
  require_not_pole(design.poles.sigmas, lambda);
  Complex s = 0;
  for (std::size_t j = 0; j < design.alphas.size(); ++j) s += design.alphas[j] / (lambda - design.poles.sigmas[j]);
  return 1.0 - lambda * s;
}

Complex rho_eval(const ShiftSet& ss, Complex lambda) {
  require_not_pole(ss.sigmas, lambda);
  Complex p = 1;
  for (const Complex& s : ss.sigmas) p *= -s / (lambda - s);
  return p;
}

void write_design_csv(std::ostream& out, const ShiftDesign& d) {
  const auto old = out.precision(17);
  out << "index,sigma_re,sigma_im,alpha_re,alpha_im\n";
  for (std::size_t j = 0; j < d.alphas.size(); ++j) {
    out << j << ',' << d.poles.sigmas[j].real() << ',' << d.poles.sigmas[j].imag() << ',' << d.alphas[j].real()
        << ',' << d.alphas[j].imag() << '\n';
  }
  out << "objective," << d.objective << '\n';
  out.precision(old);
}

void write_spectrum_csv(std::ostream& out, const ShiftDesign& d, std::span<const Real> lambdas) {
  const auto old = out.precision(17);
  out << "lambda,rho_re,rho_im,precond_re,precond_im\n";
  for (Real l : lambdas) {
    const Complex rho = rho_eval(d, l);
    const Complex pc = 1.0 - rho;
    out << l << ',' << rho.real() << ',' << rho.imag() << ',' << pc.real() << ',' << pc.imag() << '\n';
  }
  out.precision(old);
}

}  // namespace schurlr
