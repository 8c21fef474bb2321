#include <benchmark/benchmark.h>

#include <map>

#include "schurlr/ilut.hpp"
#include "schurlr/krylov.hpp"
#include "schurlr/mslr.hpp"
#include "schurlr/probgen.hpp"
#include "schurlr/reorder.hpp"
#include "schurlr/shifts.hpp"

using namespace schurlr;

namespace {

const CsrMatrix<Complex>& poisson(Index n) {
  static std::map<Index, CsrMatrix<Complex>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, laplacian_7pt<Complex>({n, n, n, 0.0})).first;
  return it->second;
}

MslrParams params_for(benchmark::State& state) {
  MslrParams p;
  p.levels = static_cast<int>(state.range(1));
  p.parts = 8;
  p.rank = state.range(2);
  return p;
}

}  // namespace

static void BM_Spmv(benchmark::State& state) {
  const auto& a = poisson(state.range(0));
  const Vector<Complex> x(a.rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spmv(a, std::span<const Complex>(x)));
  state.SetItemsProcessed(state.iterations() * a.nnz());
}
BENCHMARK(BM_Spmv)->Arg(16)->Arg(32);

static void BM_Ilut(benchmark::State& state) {
  const auto& a = poisson(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ilut(a, 1e-2, 50));
}
BENCHMARK(BM_Ilut)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Reorder(benchmark::State& state) {
  const AdjGraph g = build_graph(poisson(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(multilevel_reorder(g, 3, 8));
}
BENCHMARK(BM_Reorder)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// args: grid size, levels, rank
static void BM_MslrSetup(benchmark::State& state) {
  const auto& a = poisson(state.range(0));
  const MslrParams p = params_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(MslrPreconditioner::setup(a, p));
}
BENCHMARK(BM_MslrSetup)->Args({16, 2, 0})->Args({16, 2, 10})->Args({16, 3, 10})->Unit(benchmark::kMillisecond);

static void BM_MslrApply(benchmark::State& state) {
  const auto& a = poisson(state.range(0));
  MslrParams p = params_for(state);
  p.root_inner_iters = 0;
  const auto m = MslrPreconditioner::setup(a, p);
  const Vector<Complex> b(a.rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(m.apply(b));
}
BENCHMARK(BM_MslrApply)->Args({16, 2, 0})->Args({16, 2, 10})->Args({16, 3, 10})->Unit(benchmark::kMicrosecond);

static void BM_Solve(benchmark::State& state) {
  const auto& a = poisson(state.range(0));
  const MslrParams p = params_for(state);
  const auto b = rhs_for_ones(a);
  const LinearOperator<Complex> aop = [&a](const Vector<Complex>& x) { return spmv(a, std::span<const Complex>(x)); };
  Index its = 0;
  for (auto _ : state) {
    const auto m = MslrPreconditioner::setup(a, p);
    const auto r = fgmres<Complex>(aop, m.as_operator(), b, KrylovParams{});
    its = r.stats.iterations;
  }
  state.counters["its"] = static_cast<double>(its);
}
BENCHMARK(BM_Solve)->Args({16, 2, 0})->Args({16, 2, 10})->Args({32, 2, 10})->Unit(benchmark::kMillisecond);

static void BM_ShiftDesign(benchmark::State& state) {
  const ShiftSet ss = circle_poles(static_cast<int>(state.range(0)), 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(design_shifts(ss, WeightFunction{}));
}
BENCHMARK(BM_ShiftDesign)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
