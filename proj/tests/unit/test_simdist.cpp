#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "schurlr/cost_model.hpp"
#include "schurlr/simdist.hpp"

using namespace schurlr;

namespace {

CsrMatrix<Real> tridiagonal(Index n) {
  std::vector<Triplet<Real>> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return CsrMatrix<Real>::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("balanced layout") {
  const auto l = RowLayout::balanced(10, 4);
  CHECK(l.local_size(0) == 3);
  CHECK(l.local_size(1) == 3);
  CHECK(l.local_size(2) == 2);
  CHECK(l.local_size(3) == 2);
  CHECK(l.owner(0) == 0);
  CHECK(l.owner(5) == 1);
  CHECK(l.owner(9) == 3);
  for (Index n : {1, 7, 64, 101})
    for (int p : {1, 2, 3, 4, 8}) {
      if (p > n) continue;
      const auto lay = RowLayout::balanced(n, p);
      CHECK(lay.size() == n);
      CHECK(lay.max_local_size() - lay.local_size(p - 1) <= 1);
    }
}

TEST_CASE("partition_rows splits") {
  const auto a = tridiagonal(6);
  SUBCASE("single rank has no exterior") {
    const auto sys = partition_rows(a, 1);
    CHECK(sys.ranks[0].offd.nnz() == 0);
    CHECK(sys.ranks[0].col_map.empty());
  }
  SUBCASE("tridiagonal over three ranks") {
    const auto sys = partition_rows(a, 3);
    CHECK(sys.ranks[0].col_map.size() == 1);
    CHECK(sys.ranks[1].col_map.size() == 2);
    CHECK(sys.ranks[2].col_map.size() == 1);
    for (const auto& blk : sys.ranks) CHECK(blk.diag.rows() == blk.diag.cols());
    CHECK(sys.assemble() == a);
  }
  SUBCASE("block diagonal along the split") {
    std::vector<Triplet<Real>> t;
    for (Index b = 0; b < 3; ++b)
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) t.push_back({2 * b + i, 2 * b + j, 1.0 + i + j});
    const auto sys = partition_rows(CsrMatrix<Real>::from_triplets(6, 6, t), 3);
    for (const auto& blk : sys.ranks) CHECK(blk.offd.nnz() == 0);
  }
  CHECK_THROWS(partition_rows(a, 7));
}

TEST_CASE("dist_spmv message counts") {
  const auto a = tridiagonal(6);
  const auto sys = partition_rows(a, 3);
  Fabric fabric(3);
  const std::vector<Real> x{1, 2, 3, 4, 5, 6};
  const auto y = dist_spmv(sys, DistVector<Real>::from_global(sys.layout, std::span<const Real>(x)), fabric);
  CHECK(fabric.trace().p2p_messages == 4);
  CHECK(fabric.trace().p2p_words == 4);
  CHECK(fabric.trace().allreduce_count == 0);
  CHECK(y.to_global() == spmv<Real>(a, x));
}

TEST_CASE("distributed kernels equal their serial counterparts") {
  std::mt19937_64 rng(41);
  for (int p : {1, 2, 3, 4, 8}) {
    const Index n = 53;
    const auto a = oracle::random_sparse<Complex>(n, n, 5, rng);
    const auto sys = partition_rows(a, p);
    CHECK(sys.assemble() == a);
    const auto xg = oracle::random_vector<Complex>(n, rng);
    const auto yg = oracle::random_vector<Complex>(n, rng);
    const auto x = DistVector<Complex>::from_global(sys.layout, std::span<const Complex>(xg));
    const auto y = DistVector<Complex>::from_global(sys.layout, std::span<const Complex>(yg));
    Fabric fabric(p);
    CHECK(oracle::rel_err(dist_spmv(sys, x, fabric).to_global(), spmv<Complex>(a, xg)) <= 1e-13);

    fabric.reset_trace();
    const Complex d = dist_dot(x, y, fabric);
    CHECK(std::abs(d - dot(xg, yg)) <= 1e-13 * std::abs(dot(xg, yg)));
    CHECK(fabric.trace().allreduce_count == 1);
    CHECK(fabric.trace().allreduce_words == 1);

    fabric.reset_trace();
    const Complex alpha(0.5, -2.0);
    CHECK(oracle::rel_err(dist_axpy(alpha, x, y, fabric).to_global(), axpy(alpha, xg, yg)) <= 1e-13);
    CHECK(fabric.trace().p2p_messages == 0);
    CHECK(fabric.trace().allreduce_count == 0);
    CHECK(fabric.trace().gather_count == 0);
  }
}

TEST_CASE("traces are deterministic") {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_sparse<Real>(40, 40, 4, rng);
  const auto xg = oracle::random_vector<Real>(40, rng);
  auto run = [&] {
    const auto sys = partition_rows(a, 4);
    Fabric fabric(4);
    const auto x = DistVector<Real>::from_global(sys.layout, std::span<const Real>(xg));
    const auto y = dist_spmv(sys, x, fabric);
    dist_dot(x, y, fabric);
    return std::make_pair(fabric.trace(), y.to_global());
  };
  CHECK(run() == run());
}

TEST_CASE("cost model arithmetic") {
  CommTrace t;
  t.allreduce_count = 1;
  t.allreduce_words = 100;
  CHECK(model_cost(t, {.ts = 1.0, .tw = 0.01, .tc = 0.0, .p = 8}).allreduce == 6.0);

  CommTrace msg;
  msg.p2p_messages = 1;
  CHECK(model_cost(msg, {.ts = 2.5, .tw = 1.0, .tc = 0.0, .p = 4}).p2p == 2.5);

  const auto sys = partition_rows(CsrMatrix<Real>::identity(1000), 10);
  const std::vector<Real> ones(1000, 1.0);
  const auto x = DistVector<Real>::from_global(sys.layout, std::span<const Real>(ones));
  Fabric fabric(10);
  dist_dot(x, x, fabric);
  CHECK(model_cost(fabric.trace(), {.ts = 0.0, .tw = 0.0, .tc = 1.0, .p = 10}).total() == 200.0);

  CommTrace g;
  g.gather_count = 1;
  g.gather_words = 10;
  CHECK(model_cost(g, {.ts = 1.0, .tw = 1.0, .tc = 0.0, .p = 4}).gather == doctest::Approx(2.0 + 30.0));

  CHECK(log2_ceil(1) == 0);
  CHECK(log2_ceil(5) == 3);
  CHECK(log2_ceil(8) == 3);
}

TEST_CASE("model cost is linear in the trace") {
  CommTrace t;
  t.p2p_messages = 3;
  t.p2p_words = 17;
  t.allreduce_count = 2;
  t.allreduce_words = 5;
  t.gather_count = 1;
  t.gather_words = 9;
  t.flops = 1234;
  const CostParams params{.ts = 1e-6, .tw = 1e-9, .tc = 1e-10, .p = 6};
  const auto one = model_cost(t, params);
  const auto two = model_cost(t + t, params);
  CHECK(two.p2p == doctest::Approx(2 * one.p2p));
  CHECK(two.allreduce == doctest::Approx(2 * one.allreduce));
  CHECK(two.gather == doctest::Approx(2 * one.gather));
  CHECK(two.compute == doctest::Approx(2 * one.compute));

  std::ostringstream csv;
  write_cost_csv(csv, t, params);
  CHECK(csv.str().find("allreduce_count,2") != std::string::npos);
}
