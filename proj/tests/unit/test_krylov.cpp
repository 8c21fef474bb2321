#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "schurlr/krylov.hpp"
#include "schurlr/probgen.hpp"

using namespace schurlr;
using oracle::Mat;

namespace {

template <class T>
LinearOperator<T> dense_op(const Mat<T>& a) {
  return [a](const Vector<T>& x) { return oracle::stdvec<T>(a * oracle::vec(x)); };
}

template <class T>
LinearOperator<T> csr_op(const CsrMatrix<T>& a) {
  return [a](const Vector<T>& x) { return spmv(a, std::span<const T>(x)); };
}

template <class T>
Mat<T> well_conditioned(Index n, std::mt19937_64& rng) {
  return oracle::random_dense<T>(n, n, rng) + Mat<T>::Identity(n, n) * T(static_cast<Real>(n) / 4.0);
}

bool nonincreasing_within_cycles(const SolveStats& st, Index restart) {
  // history[0] is the initial residual; iterations 1..restart form cycle 1
  for (std::size_t i = 1; i < st.history.size(); ++i) {
    const bool cycle_start = (i - 1) % static_cast<std::size_t>(restart) == 0;
    if (!cycle_start && st.history[i] > st.history[i - 1] * (1 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identity operator converges in one iteration") {
  std::mt19937_64 rng(1);
  const auto b = oracle::random_vector<Complex>(20, rng);
  const LinearOperator<Complex> id = [](const Vector<Complex>& x) { return x; };
  const auto r = fgmres<Complex>(id, {}, b, KrylovParams{});
  CHECK(r.stats.converged);
  CHECK(r.stats.iterations == 1);
  CHECK(oracle::rel_err(r.x, b) <= 1e-14);
}

TEST_CASE("exact preconditioner converges in one iteration") {
  std::mt19937_64 rng(2);
  const Mat<Real> a = well_conditioned<Real>(40, rng);
  const Mat<Real> ainv = a.inverse();
  const auto b = oracle::random_vector<Real>(40, rng);
  KrylovParams kp;
  kp.tol = 1e-12;
  const auto r = fgmres<Real>(dense_op(a), dense_op(ainv), b, kp);
  CHECK(r.stats.iterations == 1);
  CHECK(r.stats.relative_residual <= 1e-12);
}

TEST_CASE("random 50x50 systems match a dense solve") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 4; ++rep) {
    const Mat<Complex> a = well_conditioned<Complex>(50, rng);
    const auto b = oracle::random_vector<Complex>(50, rng);
    KrylovParams kp;
    kp.tol = 1e-10;
    kp.restart = 15;
    const auto r = fgmres<Complex>(dense_op(a), {}, b, kp);
    REQUIRE(r.stats.converged);
    const auto want = oracle::stdvec<Complex>(a.partialPivLu().solve(oracle::vec(b)));
    const Eigen::JacobiSVD<Mat<Complex>> svd(a);
    const Real kappa = svd.singularValues()(0) / svd.singularValues()(49);
    CHECK(oracle::rel_err(r.x, want) <= 10 * kp.tol * kappa);
  }
}

TEST_CASE("zero right-hand side") {
  const auto a = csr_op(laplacian_7pt<Real>({3, 3, 3, 0.0}));
  const Vector<Real> b(27, 0.0);
  for (auto solver : {fgmres<Real>, gmres_right<Real>}) {
    const auto r = solver(a, {}, b, KrylovParams{}, Vector<Real>(27, 1.0), nullptr);
    CHECK(r.stats.iterations == 0);
    CHECK(r.stats.converged);
    CHECK(norm2(r.x) == 0.0);
  }
}

TEST_CASE("dimension mismatch and bad parameters throw") {
  const auto a = csr_op(laplacian_7pt<Real>({2, 2, 2, 0.0}));
  const Vector<Real> b(5, 1.0);
  CHECK_THROWS_AS(fgmres<Real>(a, {}, b, KrylovParams{}), DimensionMismatch);
  KrylovParams bad;
  bad.restart = 0;
  CHECK_THROWS_AS(fgmres<Real>(a, {}, Vector<Real>(8, 1.0), bad), std::invalid_argument);
  bad = KrylovParams{};
  bad.tol = 0;
  CHECK_THROWS_AS(gmres<Real>(a, Vector<Real>(8, 1.0), bad), std::invalid_argument);
}

TEST_CASE("recurrence residual matches the explicit residual at restarts") {
  const auto a = laplacian_7pt<Complex>({8, 8, 8, 0.5});
  const auto b = rhs_for_ones(a);
  KrylovParams kp;
  kp.restart = 10;
  kp.tol = 1e-9;
  kp.maxit = 400;
  const auto r = fgmres<Complex>(csr_op(a), {}, b, kp);
  REQUIRE(r.stats.converged);
  REQUIRE(r.stats.restart_checks.size() > 2);
  for (const auto& [estimate, explicit_res] : r.stats.restart_checks)
    CHECK(std::abs(estimate - explicit_res) <= 1e-10 * std::max(explicit_res, 1e-300) + 1e-15);
  CHECK(nonincreasing_within_cycles(r.stats, kp.restart));
  CHECK(oracle::rel_err(r.x, Vector<Complex>(a.rows(), 1.0)) <= 1e-6);
}

TEST_CASE("flexible and right-preconditioned GMRES agree for a fixed preconditioner") {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_sparse<Real>(80, 80, 5, rng, true);
  const Mat<Real> ad = oracle::dense(a);
  // Jacobi-like fixed preconditioner
  Mat<Real> m = Mat<Real>::Zero(80, 80);
  for (Index i = 0; i < 80; ++i) m(i, i) = 1.0 / ad(i, i);
  const auto b = oracle::random_vector<Real>(80, rng);
  KrylovParams kp;
  kp.restart = 7;
  kp.tol = 1e-11;
  const auto f = fgmres<Real>(csr_op(a), dense_op(m), b, kp);
  const auto g = gmres_right<Real>(csr_op(a), dense_op(m), b, kp);
  CHECK(f.stats.iterations == g.stats.iterations);
  CHECK(oracle::rel_err(f.x, g.x) <= 1e-12);
  REQUIRE(f.stats.history.size() == g.stats.history.size());
  for (std::size_t i = 0; i < f.stats.history.size(); ++i)
    CHECK(f.stats.history[i] == doctest::Approx(g.stats.history[i]).epsilon(1e-10));
}

TEST_CASE("identity preconditioner reduces to plain GMRES bit for bit") {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_sparse<Complex>(60, 60, 4, rng, true);
  const auto b = oracle::random_vector<Complex>(60, rng);
  KrylovParams kp;
  kp.restart = 9;
  kp.tol = 1e-10;
  const LinearOperator<Complex> id = [](const Vector<Complex>& x) { return x; };
  const auto plain = gmres<Complex>(csr_op(a), b, kp);
  const auto right = gmres_right<Complex>(csr_op(a), id, b, kp);
  CHECK(plain.x == right.x);
  CHECK(plain.stats.history == right.stats.history);
}

TEST_CASE("varying preconditioner is tolerated by FGMRES") {
  std::mt19937_64 rng(7);
  const auto a = laplacian_7pt<Real>({6, 6, 6, 0.0});
  const auto b = rhs_for_ones(a);
  // a few inner GMRES steps: a different operator on every call
  const LinearOperator<Real> inner = [&a](const Vector<Real>& v) {
    KrylovParams kp;
    kp.restart = 3;
    kp.maxit = 3;
    return gmres<Real>(csr_op(a), v, kp).x;
  };
  KrylovParams kp;
  kp.tol = 1e-8;
  const auto r = fgmres<Real>(csr_op(a), inner, b, kp);
  CHECK(r.stats.converged);
  CHECK(oracle::rel_err(r.x, Vector<Real>(a.rows(), 1.0)) <= 1e-6);
}

TEST_CASE("maxit exhaustion reports failure") {
  const auto a = laplacian_7pt<Real>({10, 10, 10, 0.0});
  const auto b = rhs_for_ones(a);
  KrylovParams kp;
  kp.restart = 5;
  kp.maxit = 7;
  kp.tol = 1e-12;
  const auto r = fgmres<Real>(csr_op(a), {}, b, kp);
  CHECK_FALSE(r.stats.converged);
  CHECK(r.stats.iterations == 7);
  CHECK(r.stats.history.size() == 8);
}

TEST_CASE("reductions are counted on the fabric") {
  const auto a = laplacian_7pt<Real>({4, 4, 4, 0.0});
  const auto b = rhs_for_ones(a);
  KrylovParams kp;
  kp.restart = 50;
  kp.maxit = 3;
  Fabric fabric(4);
  const auto r = gmres<Real>(csr_op(a), b, kp, {}, &fabric);
  REQUIRE(r.stats.iterations == 3);
  // |b|, |r0|, (j+1) dots + 1 norm per step, final |r|
  CHECK(fabric.trace().allreduce_count == 2 + (2 + 3 + 4) + 1);
}

TEST_CASE("history csv") {
  SolveStats st;
  st.history = {1.0, 0.5};
  std::ostringstream os;
  write_history_csv(os, st);
  CHECK(os.str() == "iteration,relative_residual\n0,1\n1,0.5\n");
}
