#include "schurlr_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "schurlr/matrix_market.hpp"
#include "schurlr/probgen.hpp"
#include "schurlr/shifts.hpp"
#include "schurlr/simdist.hpp"

namespace schurlr::cli {

namespace {

constexpr const char* kCommands[] = {"generate", "solve", "bench", "design-shifts", "cost-report"};

void bind(CLI::App& app, RunConfig& c) {
  app.add_option("--problem", c.problem.kind, "laplace3d | laplace2d | diag")
      ->check(CLI::IsMember({"laplace3d", "laplace2d", "diag"}));
  app.add_option("--nx", c.problem.nx, "grid points in x (diag: size)")->check(CLI::PositiveNumber);
  app.add_option("--ny", c.problem.ny, "grid points in y")->check(CLI::PositiveNumber);
  app.add_option("--nz", c.problem.nz, "grid points in z")->check(CLI::PositiveNumber);
  app.add_option("--gamma", c.problem.gamma, "3-D reaction shift on the diagonal");
  app.add_option("--shift", c.problem.shift, "2-D Laplacian shift");
  app.add_option("--lo", c.problem.lo, "diag: smallest eigenvalue");
  app.add_option("--hi", c.problem.hi, "diag: largest eigenvalue");
  app.add_option("--matrix", c.problem.matrix, "Matrix Market input instead of a generator");

  app.add_option("--lev", c.mslr.levels, "levels l_ev");
  app.add_option("--p", c.mslr.parts, "parts per level (simulated ranks)");
  app.add_option("--k", c.mslr.rank, "low-rank correction rank per level");
  app.add_option("--tau", c.mslr.tau, "ILUT drop tolerance");
  app.add_option("--lfil", c.mslr.lfil, "ILUT fill per row and factor");
  app.add_option("--max-cycles", c.mslr.max_cycles, "Arnoldi restart cycles");
  app.add_option("--root-iters", c.mslr.root_inner_iters, "inner GMRES steps at the root (0: single pass)");
  app.add_option("--shift-factor", c.mslr.shift_factor, "complex ILU shift factor");
  app.add_option("--last-blocks", c.mslr.last_level_blocks, "last-level block-Jacobi blocks (0: p)");

  app.add_option("--restart", c.krylov.restart, "FGMRES restart length");
  app.add_option("--tol", c.krylov.tol, "relative residual tolerance");
  app.add_option("--maxit", c.krylov.maxit, "iteration limit");

  app.add_option("--ts", c.cost.ts, "message startup time");
  app.add_option("--tw", c.cost.tw, "per-word transfer time");
  app.add_option("--tc", c.cost.tc, "per-flop time");

  app.add_option("--output,-o", c.output, "output path, - for stdout");
  app.add_option("--history", c.history, "solve: residual history CSV path");
  app.add_option("--level-stats", c.level_stats, "solve: per-level statistics CSV path");
  app.add_option("--bench-lev", c.bench_lev, "bench: levels list");
  app.add_option("--bench-p", c.bench_p, "bench: parts list");
  app.add_option("--bench-k", c.bench_k, "bench: rank list");
  app.add_option("--poles", c.poles, "design-shifts: pole count (even)");
  app.add_option("--radius", c.radius, "design-shifts: pole circle radius");
  app.add_option("--a", c.a, "design-shifts: interval start");
  app.add_option("--b", c.b, "design-shifts: interval end");
  app.add_option("--spectrum", c.spectrum, "design-shifts: rho on [lo, hi] CSV path");
  app.add_option("--spectrum-points", c.spectrum_points, "design-shifts: grid size of the spectrum dump");
  app.add_option("--kernel", c.kernel, "cost-report: dot | axpy | spmv | gather | apply")
      ->check(CLI::IsMember({"dot", "axpy", "spmv", "gather", "apply"}));
  app.add_option("--n", c.n, "cost-report: vector length")->check(CLI::PositiveNumber);
  app.set_config("--config", "", "flat key=value configuration file");
}

void setup_app(CLI::App& app, RunConfig& c) {
  app.require_subcommand(1);
  app.fallthrough();
  bind(app, c);
  app.add_subcommand("generate", "write the problem matrix in Matrix Market format");
  app.add_subcommand("solve", "set up the preconditioner, run FGMRES, emit one CSV row");
  app.add_subcommand("bench", "sweep levels, parts and rank; one CSV row per run");
  app.add_subcommand("design-shifts", "optimal weights for circle poles; design and spectrum CSV");
  app.add_subcommand("cost-report", "trace one kernel on the simulated fabric and model its time");
}

std::string fmt(Real v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

std::vector<long long> parse_list(const std::string& s, const char* what) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

// Owns the file stream when the path is not "-".
struct Sink {
  explicit Sink(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path.empty() || path == "-") return;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw std::runtime_error("cannot open " + path + " for writing");
    stream = file.get();
  }
  std::ostream& operator*() { return *stream; }

  std::unique_ptr<std::ofstream> file;
  std::ostream* stream;
};

bool all_real(const CsrMatrix<Complex>& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](const Complex& v) { return v.imag() == 0; });
}

CsrMatrix<Real> real_part(const CsrMatrix<Complex>& a) {
  std::vector<Real> v;
  for (const Complex& x : a.values()) v.push_back(x.real());
  return CsrMatrix<Real>(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                         {a.col_idx().begin(), a.col_idx().end()}, std::move(v));
}

int run_generate(const RunConfig& c, std::ostream& out) {
  const auto a = load_problem(c.problem);
  Sink sink(c.output, out);
  if (all_real(a))
    write_matrix_market(real_part(a), *sink);
  else
    write_matrix_market(a, *sink);
  return 0;
}

int run_solve_command(const RunConfig& c, std::ostream& out) {
  const auto a = load_problem(c.problem);
  SolveStats stats;
  std::vector<MslrLevelStats> levels;
  const SolveRow row = run_solve(a, c.mslr, c.krylov, &stats, &levels);
  Sink sink(c.output, out);
  *sink << solve_header() << '\n' << format_row(row) << '\n';
  if (!c.history.empty()) {
    Sink h(c.history, out);
    write_history_csv(*h, stats);
  }
  if (!c.level_stats.empty()) {
    Sink l(c.level_stats, out);
    write_level_stats_csv(*l, levels);
  }
  return 0;
}

int run_bench(const RunConfig& c, std::ostream& out) {
  const auto a = load_problem(c.problem);
  const auto levs = parse_list(c.bench_lev, "bench-lev");
  const auto ps = parse_list(c.bench_p, "bench-p");
  const auto ks = parse_list(c.bench_k, "bench-k");
  Sink sink(c.output, out);
  *sink << "lev," << solve_header() << '\n';
  for (long long lev : levs)
    for (long long p : ps)
      for (long long k : ks) {
        MslrParams mp = c.mslr;
        mp.levels = static_cast<int>(lev);
        mp.parts = static_cast<int>(p);
        mp.rank = static_cast<Index>(k);
        const SolveRow row = run_solve(a, mp, c.krylov);
        *sink << row.levels << ',' << format_row(row) << '\n';
      }
  return 0;
}

int run_design(const RunConfig& c, std::ostream& out) {
  WeightFunction w;
  w.a = c.a;
  w.b = c.b;
  const ShiftDesign d = design_shifts(circle_poles(c.poles, c.radius), w);
  Sink sink(c.output, out);
  write_design_csv(*sink, d);
  if (!c.spectrum.empty()) {
    if (c.spectrum_points < 2) throw std::invalid_argument("spectrum-points must be >= 2");
    std::vector<Real> lams(c.spectrum_points);
    for (Index i = 0; i < c.spectrum_points; ++i)
      lams[i] = c.problem.lo + (c.problem.hi - c.problem.lo) * static_cast<Real>(i) /
                                   static_cast<Real>(c.spectrum_points - 1);
    Sink s(c.spectrum, out);
    write_spectrum_csv(*s, d, lams);
  }
  return 0;
}

int run_cost(const RunConfig& c, std::ostream& out) {
  CostParams cp = c.cost;
  cp.p = c.mslr.parts;
  cp.validate();
  Fabric fabric(cp.p);
  if (c.kernel == "dot" || c.kernel == "axpy" || c.kernel == "gather") {
    const RowLayout layout = RowLayout::balanced(c.n, cp.p);
    const Vector<Real> ones(c.n, 1.0);
    const auto x = DistVector<Real>::from_global(layout, ones);
    if (c.kernel == "dot")
      (void)dist_dot(x, x, fabric);
    else if (c.kernel == "axpy")
      (void)dist_axpy(2.0, x, x, fabric);
    else
      (void)dist_gather(x, fabric);
  } else if (c.kernel == "spmv") {
    const auto a = load_problem(c.problem);
    const auto sys = partition_rows(a, cp.p);
    const Vector<Complex> ones(a.rows(), 1.0);
    (void)dist_spmv(sys, DistVector<Complex>::from_global(sys.layout, ones), fabric);
  } else {
    const auto a = load_problem(c.problem);
    const auto m = MslrPreconditioner::setup(a, c.mslr);
    const Vector<Complex> ones(a.rows(), 1.0);
    (void)m.apply(ones, &fabric);
  }
  Sink sink(c.output, out);
  *sink << "kernel " << c.kernel << '\n';
  write_cost_table(*sink, fabric.trace(), cp);
  return 0;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"schurlr: multilevel Schur low-rank preconditioning"};
  setup_app(app, c);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app.parse(rev);
  for (const char* name : kCommands)
    if (app.got_subcommand(name)) c.command = name;
  return c;
}

std::string to_config(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&os](const char* k, const std::string& v) { os << k << '=' << v << '\n'; };
  kv("problem", quoted(c.problem.kind));
  kv("nx", std::to_string(c.problem.nx));
  kv("ny", std::to_string(c.problem.ny));
  kv("nz", std::to_string(c.problem.nz));
  kv("gamma", fmt(c.problem.gamma));
  kv("shift", fmt(c.problem.shift));
  kv("lo", fmt(c.problem.lo));
  kv("hi", fmt(c.problem.hi));
  kv("matrix", quoted(c.problem.matrix));
  kv("lev", std::to_string(c.mslr.levels));
  kv("p", std::to_string(c.mslr.parts));
  kv("k", std::to_string(c.mslr.rank));
  kv("tau", fmt(c.mslr.tau));
  kv("lfil", std::to_string(c.mslr.lfil));
  kv("max-cycles", std::to_string(c.mslr.max_cycles));
  kv("root-iters", std::to_string(c.mslr.root_inner_iters));
  kv("shift-factor", fmt(c.mslr.shift_factor));
  kv("last-blocks", std::to_string(c.mslr.last_level_blocks));
  kv("restart", std::to_string(c.krylov.restart));
  kv("tol", fmt(c.krylov.tol));
  kv("maxit", std::to_string(c.krylov.maxit));
  kv("ts", fmt(c.cost.ts));
  kv("tw", fmt(c.cost.tw));
  kv("tc", fmt(c.cost.tc));
  kv("output", quoted(c.output));
  kv("history", quoted(c.history));
  kv("level-stats", quoted(c.level_stats));
  kv("bench-lev", quoted(c.bench_lev));
  kv("bench-p", quoted(c.bench_p));
  kv("bench-k", quoted(c.bench_k));
  kv("poles", std::to_string(c.poles));
  kv("radius", fmt(c.radius));
  kv("a", fmt(c.a));
  kv("b", fmt(c.b));
  kv("spectrum", quoted(c.spectrum));
  kv("spectrum-points", std::to_string(c.spectrum_points));
  kv("kernel", quoted(c.kernel));
  kv("n", std::to_string(c.n));
  return os.str();
}

CsrMatrix<Complex> load_problem(const ProblemSpec& s) {
  if (!s.matrix.empty()) {
    const MmHeader h = read_matrix_market_header(s.matrix);
    if (h.field == MmField::Complex) return read_matrix_market<Complex>(s.matrix);
    return convert<Complex>(read_matrix_market<Real>(s.matrix));
  }
  if (s.kind == "laplace3d") return laplacian_7pt<Complex>({s.nx, s.ny, s.nz, s.gamma});
  if (s.kind == "laplace2d") return convert<Complex>(shifted_laplacian_2d(s.nx, s.ny, s.shift));
  if (s.kind == "diag") return convert<Complex>(uniform_spectrum_diag(s.nx, s.lo, s.hi));
  throw std::invalid_argument("unknown problem '" + s.kind + "'");
}

SolveRow run_solve(const CsrMatrix<Complex>& a, const MslrParams& mp, const KrylovParams& kp, SolveStats* stats_out,
                   std::vector<MslrLevelStats>* levels_out) {
  const auto m = MslrPreconditioner::setup(a, mp);
  const auto b = rhs_for_ones(a);
  const LinearOperator<Complex> aop = [&a](const Vector<Complex>& x) { return spmv(a, std::span<const Complex>(x)); };
  auto res = fgmres<Complex>(aop, m.as_operator(), b, kp);
  res.stats.setup_seconds = m.setup_seconds();
  SolveRow row;
  row.n = a.rows();
  row.parts = mp.parts;
  row.rank = mp.rank;
  row.levels = m.levels();
  row.fill = m.fill();
  row.setup_seconds = m.setup_seconds();
  row.iteration_seconds = res.stats.iteration_seconds;
  row.iterations = res.stats.iterations;
  row.converged = res.stats.converged;
  if (stats_out) *stats_out = std::move(res.stats);
  if (levels_out) levels_out->assign(m.stats().begin(), m.stats().end());
  return row;
}

std::string solve_header() { return "n,n_p,k,fill,p-t,i-t,its"; }

std::string format_row(const SolveRow& r) {
  std::ostringstream os;
  os << r.n << ',' << r.parts << ',' << r.rank << ',' << std::fixed << std::setprecision(4) << r.fill << ','
     << r.setup_seconds << ',' << r.iteration_seconds << ',';
  if (r.converged)
    os << r.iterations;
  else
    os << 'F';
  return os.str();
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "generate") return run_generate(c, out);
    if (c.command == "solve") return run_solve_command(c, out);
    if (c.command == "bench") return run_bench(c, out);
    if (c.command == "design-shifts") return run_design(c, out);
    if (c.command == "cost-report") return run_cost(c, out);
    err << "schurlr: unknown command '" << c.command << "'\n";
    return 2;
  } catch (const std::exception& e) {
    err << "schurlr " << c.command << ": " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"schurlr: multilevel Schur low-rank preconditioning"};
  setup_app(app, c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  for (const char* name : kCommands)
    if (app.got_subcommand(name)) c.command = name;
  return run(c, out, err);
}

}  // namespace schurlr::cli
