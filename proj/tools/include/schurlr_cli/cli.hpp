#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "schurlr/cost_model.hpp"
#include "schurlr/csr.hpp"
#include "schurlr/krylov.hpp"
#include "schurlr/mslr.hpp"

namespace schurlr::cli {

struct ProblemSpec {
  std::string kind = "laplace3d";  ///< laplace3d | laplace2d | diag
  Index nx = 16, ny = 16, nz = 16;
  Real gamma = 0.0;  ///< 3-D reaction shift
  Real shift = 0.0;  ///< 2-D shift
  Real lo = 0.08, hi = 16.0;  ///< diag spectrum, n = nx
  std::string matrix;  ///< Matrix Market input, overrides the generator
};

struct RunConfig {
  std::string command;
  ProblemSpec problem;
  MslrParams mslr;
  KrylovParams krylov;
  CostParams cost;
  std::string output = "-";
  std::string history;      ///< solve: residual history CSV
  std::string level_stats;  ///< solve: per-level CSV
  // bench sweeps, comma separated
  std::string bench_lev = "1,2,3";
  std::string bench_p = "4";
  std::string bench_k = "0,10";
  // design-shifts
  int poles = 4;
  Real radius = 0.8;
  Real a = -2.0, b = 2.0;
  std::string spectrum;  ///< also write rho over a uniform grid here
  Index spectrum_points = 201;
  // cost-report
  std::string kernel = "dot";  ///< dot | axpy | spmv | gather | apply
  Index n = 1000;
};

/// Parses argv (subcommand first). Throws CLI11 parse exceptions.
RunConfig parse_args(const std::vector<std::string>& args);

/// Flat key=value form of every option; reading it back with --config
/// reproduces the configuration.
std::string to_config(const RunConfig& cfg);

/// The problem matrix: read from file or generated. Real inputs are promoted.
CsrMatrix<Complex> load_problem(const ProblemSpec& spec);

struct SolveRow {
  Index n = 0;
  int parts = 0;
  Index rank = 0;
  int levels = 0;
  Real fill = 0;
  double setup_seconds = 0;
  double iteration_seconds = 0;
  Index iterations = 0;
  bool converged = false;
};

/// Setup plus FGMRES on b = A * ones from x0 = 0.
SolveRow run_solve(const CsrMatrix<Complex>& a, const MslrParams& mp, const KrylovParams& kp,
                   SolveStats* stats_out = nullptr, std::vector<MslrLevelStats>* levels_out = nullptr);

/// `n,n_p,k,fill,p-t,i-t,its`; its is F when the solve did not converge.
std::string solve_header();
std::string format_row(const SolveRow& row);

/// Runs the configured subcommand. Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: parsing, help, errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schurlr::cli
