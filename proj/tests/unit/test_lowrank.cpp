#include <doctest.h>

#include <algorithm>

#include "oracle.hpp"
#include "schurlr/lowrank.hpp"

using namespace schurlr;
using oracle::Mat;

namespace {

LinearOperator<Complex> dense_op(const Mat<Complex>& g) {
  return [g](const Vector<Complex>& x) { return oracle::stdvec<Complex>(g * oracle::vec(x)); };
}

Real orthogonality_error(const CMatrix& v) {
  const Mat<Complex> m = oracle::dense(v);
  return (m.adjoint() * m - Mat<Complex>::Identity(m.cols(), m.cols())).norm();
}

// Matches each expected value to its nearest unused computed value.
Real multiset_distance(std::vector<Complex> got, std::vector<Complex> want) {
  Real worst = 0;
  for (const Complex& w : want) {
    auto it = std::min_element(got.begin(), got.end(),
                               [&](Complex a, Complex b) { return std::abs(a - w) < std::abs(b - w); });
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

std::vector<Complex> eigen_eigenvalues(const Mat<Complex>& m) {
  Eigen::ComplexEigenSolver<Mat<Complex>> es(m, false);
  return oracle::stdvec<Complex>(es.eigenvalues());
}

}  // namespace

TEST_CASE("arnoldi relation and orthonormality") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 5; ++rep) {
    const Mat<Complex> g = oracle::random_dense<Complex>(30, 30, rng);
    const auto v0 = oracle::random_vector<Complex>(30, rng);
    Fabric fabric(4);
    const auto ar = arnoldi(dense_op(g), 30, 12, v0, &fabric);
    REQUIRE(ar.steps() == 12);
    CHECK(orthogonality_error(ar.V) <= 1e-10);
    const Mat<Complex> v = oracle::dense(ar.V);
    const Mat<Complex> h = oracle::dense(ar.H);
    const Mat<Complex> resid = g * v.leftCols(12) - v * h;
    CHECK(resid.norm() <= 1e-10 * h.norm());
    CHECK(fabric.trace().allreduce_count == 2 * 12);
  }
  CHECK_THROWS(arnoldi(dense_op(Mat<Complex>::Identity(3, 3)), 3, 2, std::vector<Complex>(3)));
}

TEST_CASE("arnoldi on a diagonal operator recovers its spectrum") {
  Mat<Complex> d = Mat<Complex>::Zero(8, 8);
  std::vector<Complex> want;
  for (Index i = 0; i < 8; ++i) {
    d(i, i) = Complex(1.0 + i, 0.5 * i);
    want.push_back(d(i, i));
  }
  const auto ar = arnoldi(dense_op(d), 8, 8, std::vector<Complex>(8, Complex(1)));
  CHECK(ar.steps() == 8);
  CHECK(multiset_distance(eigen_eigenvalues(oracle::dense(ar.H).topRows(8)), want) <= 1e-8);
}

TEST_CASE("arnoldi exits early on breakdown") {
  Mat<Complex> g = Mat<Complex>::Zero(10, 10);
  g(0, 0) = 2.0;
  g(1, 1) = 3.0;
  std::vector<Complex> v0(10, Complex(0));
  v0[0] = v0[1] = 1.0;
  const auto ar = arnoldi(dense_op(g), 10, 6, v0);
  CHECK(ar.breakdown);
  CHECK(ar.steps() == 2);
  CHECK(ar.beta == 0.0);
}

TEST_CASE("hessenberg_schur") {
  SUBCASE("triangular input is a fixed point") {
    std::mt19937_64 rng(5);
    Mat<Complex> t = oracle::random_dense<Complex>(5, 5, rng).triangularView<Eigen::Upper>();
    const auto sf = hessenberg_schur(oracle::from_eigen(t));
    CHECK(sf.T == oracle::from_eigen(t));
    CHECK(sf.Q == CMatrix::identity(5));
  }
  SUBCASE("random Hessenberg matrices") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
      Mat<Complex> h = oracle::random_dense<Complex>(12, 12, rng);
      for (Index j = 0; j < 12; ++j)
        for (Index i = j + 2; i < 12; ++i) h(i, j) = 0;
      const auto sf = hessenberg_schur(oracle::from_eigen(h));
      const Mat<Complex> q = oracle::dense(sf.Q), t = oracle::dense(sf.T);
      CHECK((q * t * q.adjoint() - h).norm() <= 1e-9 * h.norm());
      CHECK(orthogonality_error(sf.Q) <= 1e-10);
      CHECK(Mat<Complex>(t.triangularView<Eigen::StrictlyLower>()).norm() == 0.0);
      CHECK(multiset_distance(sf.eigenvalues(), eigen_eigenvalues(h)) <= 1e-8);
    }
  }
  SUBCASE("rotation generator") {
    Mat<Complex> h(2, 2);
    h << 0, 1, -1, 0;
    const auto sf = hessenberg_schur(oracle::from_eigen(h));
    CHECK(multiset_distance(sf.eigenvalues(), {Complex(0, 1), Complex(0, -1)}) <= 1e-12);
  }
  CHECK_THROWS(hessenberg_schur(oracle::from_eigen<Complex>(Mat<Complex>::Ones(3, 3))));
}

TEST_CASE("general Schur form and reordering") {
  std::mt19937_64 rng(17);
  const Mat<Complex> a = oracle::random_dense<Complex>(10, 10, rng);
  auto sf = schur(oracle::from_eigen(a));
  sort_schur(sf, 10);
  const Mat<Complex> q = oracle::dense(sf.Q), t = oracle::dense(sf.T);
  CHECK((q * t * q.adjoint() - a).norm() <= 1e-9 * a.norm());
  CHECK(orthogonality_error(sf.Q) <= 1e-10);
  for (Index i = 0; i + 1 < 10; ++i) CHECK(correction_weight(t(i, i)) >= correction_weight(t(i + 1, i + 1)));
}

TEST_CASE("rank selection follows the correction weight") {
  // eigenvalues 0.1, 0.9, 0.5 in a non-normal upper-triangular operator
  Mat<Complex> g = Mat<Complex>::Zero(3, 3);
  g << 0.1, 0.3, 0.2, 0, 0.9, 0.4, 0, 0, 0.5;
  const auto ar = arnoldi(dense_op(g), 3, 3, std::vector<Complex>(3, Complex(1)));
  REQUIRE(ar.steps() == 3);
  const auto term = select_rank_k(ar, hessenberg_schur(ar.H.block(0, 0, 3, 3)), 2);
  const auto e = term.eigenvalues();
  REQUIRE(e.size() == 2);
  CHECK(std::abs(e[0] - 0.9) <= 1e-10);
  CHECK(std::abs(e[1] - 0.5) <= 1e-10);
  CHECK(orthogonality_error(term.W) <= 1e-10);

  const auto none = select_rank_k(ar, hessenberg_schur(ar.H.block(0, 0, 3, 3)), 0);
  CHECK(none.rank() == 0);
  CHECK(apply_correction(none, std::vector<Complex>(3, Complex(1))) == std::vector<Complex>(3));
}

TEST_CASE("eigenvalue one makes the correction singular") {
  Mat<Complex> g = Mat<Complex>::Zero(2, 2);
  g << 1.0, 0.5, 0.0, 0.2;
  const auto ar = arnoldi(dense_op(g), 2, 2, std::vector<Complex>(2, Complex(1)));
  CHECK_THROWS_AS(select_rank_k(ar, hessenberg_schur(ar.H.block(0, 0, 2, 2)), 2), NumericalError);
}

TEST_CASE("full-rank correction has eigenvalues gamma / (1 - gamma)") {
  std::mt19937_64 rng(23);
  const Mat<Complex> g = 0.4 * oracle::random_dense<Complex>(16, 16, rng);
  const auto ar = arnoldi(dense_op(g), 16, 16, std::vector<Complex>(16, Complex(1)));
  REQUIRE(ar.steps() == 16);
  const auto term = select_rank_k(ar, hessenberg_schur(ar.H.block(0, 0, 16, 16)), 16);
  Mat<Complex> corr(16, 16);
  for (Index j = 0; j < 16; ++j) {
    std::vector<Complex> e(16, Complex(0));
    e[j] = 1;
    corr.col(j) = oracle::vec(apply_correction(term, e));
  }
  std::vector<Complex> want;
  for (Complex gam : eigen_eigenvalues(g)) want.push_back(gam / (Complex(1) - gam));
  CHECK(multiset_distance(eigen_eigenvalues(corr), want) <= 1e-8);
}

TEST_CASE("restarted Schur vectors") {
  std::mt19937_64 rng(31);
  SUBCASE("rank-k operator converges in one cycle") {
    const Mat<Complex> u = oracle::random_dense<Complex>(40, 3, rng);
    const Mat<Complex> w = oracle::random_dense<Complex>(40, 3, rng);
    const Mat<Complex> g = 0.1 * u * w.adjoint();
    const auto res = restarted_schur_vectors(dense_op(g), 40, 3, 5);
    CHECK(res.cycles == 1);
    CHECK(res.converged);
    const Mat<Complex> wk = oracle::dense(res.term.W), rk = oracle::dense(res.term.R);
    CHECK((g * wk - wk * rk).norm() <= 1e-10 * g.norm());
    std::vector<Complex> nonzero;
    for (Complex e : eigen_eigenvalues(g))
      if (std::abs(e) > 1e-8) nonzero.push_back(e);
    CHECK(multiset_distance(res.term.eigenvalues(), nonzero) <= 1e-10);
  }
  SUBCASE("leading eigenvalues of a random operator to two digits") {
    // decaying spectrum so that a few modes dominate
    Mat<Complex> d = Mat<Complex>::Zero(40, 40);
    for (Index i = 0; i < 40; ++i) d(i, i) = Complex(0.9 * std::pow(0.8, i), 0.05 * std::sin(i));
    const Mat<Complex> x = Mat<Complex>::Identity(40, 40) + 0.1 * oracle::random_dense<Complex>(40, 40, rng);
    const Mat<Complex> g = x * d * x.inverse();
    const auto res = restarted_schur_vectors(dense_op(g), 40, 4, 50);
    CHECK(res.converged);
    std::vector<Complex> all = eigen_eigenvalues(g);
    std::sort(all.begin(), all.end(),
              [](Complex a, Complex b) { return correction_weight(a) > correction_weight(b); });
    const auto got = res.term.eigenvalues();
    for (Index i = 0; i < 4; ++i) CHECK(std::abs(got[i] - all[i]) <= 1e-2 * std::abs(all[i]));
    CHECK(orthogonality_error(res.term.W) <= 1e-10);
  }
  SUBCASE("one cycle equals a single Arnoldi run") {
    const Mat<Complex> g = oracle::random_dense<Complex>(25, 25, rng);
    const auto res = restarted_schur_vectors(dense_op(g), 25, 3, 1);
    CHECK(res.cycles == 1);
    CHECK(res.steps == 6);
    const Real inv = 1.0 / std::sqrt(25.0);
    const auto ar = arnoldi(dense_op(g), 25, 6, std::vector<Complex>(25, Complex(inv)));
    const auto term = select_rank_k(ar, hessenberg_schur(ar.H.block(0, 0, 6, 6)), 3);
    CHECK(multiset_distance(res.term.eigenvalues(), term.eigenvalues()) <= 1e-12);
  }
}
