#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "schurlr_cli/cli.hpp"

using namespace schurlr;
using namespace schurlr::cli;

namespace {

struct Captured {
  int status;
  std::string out, err;
};

Captured run_args(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int st = run(parse_args(args), out, err);
  return {st, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

// Drops the wall-clock columns p-t and i-t.
std::string deterministic_part(const std::string& row) {
  auto f = fields(row);
  REQUIRE(f.size() == 7);
  return f[0] + ',' + f[1] + ',' + f[2] + ',' + f[3] + ',' + f[6];
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("schurlr_cli_" + name);
}

std::string value_of(const std::string& report, const std::string& key) {
  for (const auto& l : lines(report)) {
    std::istringstream is(l);
    std::string k, v;
    is >> k >> v;
    if (k == key) return v;
  }
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_args({"solve"});
  CHECK(c.command == "solve");
  CHECK(c.krylov.restart == 50);
  CHECK(c.krylov.tol == 1e-6);
  CHECK(c.krylov.maxit == 1000);
  CHECK(c.problem.nx == 16);
  CHECK(c.problem.ny == 16);
  CHECK(c.problem.nz == 16);
}

TEST_CASE("solve on the default Poisson problem") {
  const auto r = run_args({"solve"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "n,n_p,k,fill,p-t,i-t,its");
  const auto f = fields(ls[1]);
  REQUIRE(f.size() == 7);
  CHECK(f[0] == "4096");
  CHECK(f[1] == "4");
  CHECK(f[2] == "10");
  CHECK(std::stod(f[3]) > 0);
  REQUIRE(f[6] != "F");
  CHECK(std::stoi(f[6]) < 1000);
}

TEST_CASE("non-convergence is flagged") {
  const auto r = run_args({"solve", "--nx", "8", "--ny", "8", "--nz", "8", "--maxit", "2", "--tol", "1e-14"});
  REQUIRE(r.status == 0);
  CHECK(fields(lines(r.out)[1]).back() == "F");
}

TEST_CASE("design-shifts lists the circle poles") {
  const auto r = run_args({"design-shifts", "--poles", "4", "--radius", "0.8"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  const Real h = 0.8 * std::numbers::sqrt2 / 2;
  const Real want[4][2] = {{h, h}, {-h, h}, {-h, -h}, {h, -h}};
  for (int j = 0; j < 4; ++j) {
    const auto f = fields(ls[j + 1]);
    CHECK(std::abs(std::stod(f[1]) - want[j][0]) <= 1e-15);
    CHECK(std::abs(std::stod(f[2]) - want[j][1]) <= 1e-15);
  }
  CHECK(ls[5].rfind("objective,", 0) == 0);
}

TEST_CASE("design-shifts spectrum dump") {
  const auto path = temp_file("spectrum.csv");
  const auto r = run_args({"design-shifts", "--spectrum", path.string(), "--spectrum-points", "11", "--lo", "-1",
                           "--hi", "7"});
  REQUIRE(r.status == 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(lines(ss.str()).size() == 12);
  std::filesystem::remove(path);
}

TEST_CASE("cost-report for one dot product") {
  const auto r = run_args({"cost-report", "--kernel", "dot", "--p", "8", "--n", "1000"});
  REQUIRE(r.status == 0);
  CHECK(value_of(r.out, "allreduce_count") == "1");
  const CostParams d;
  const double want = 2 * d.tc * 1000 / 8 + std::log2(8.0) * (d.ts + d.tw);
  CHECK(std::stod(value_of(r.out, "time_total")) == doctest::Approx(want).epsilon(1e-3));
  const auto axpy = run_args({"cost-report", "--kernel", "axpy", "--p", "8"});
  CHECK(value_of(axpy.out, "allreduce_count") == "0");
  CHECK(value_of(axpy.out, "p2p_messages") == "0");
}

TEST_CASE("cost-report of one preconditioner application") {
  const auto r = run_args({"cost-report", "--kernel", "apply", "--lev", "3", "--k", "2", "--root-iters", "0", "--nx",
                           "12", "--ny", "12", "--nz", "12"});
  REQUIRE(r.status == 0);
  CHECK(value_of(r.out, "allreduce_count") == "7");
}

TEST_CASE("generate writes Matrix Market") {
  const auto r = run_args({"generate", "--problem", "laplace2d", "--nx", "3", "--ny", "2", "--shift", "1"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "%%MatrixMarket matrix coordinate real general");
  CHECK(ls[1] == "6 6 20");
  const auto path = temp_file("gen.mtx");
  REQUIRE(run_args({"generate", "--nx", "4", "--ny", "4", "--nz", "4", "-o", path.string()}).status == 0);
  const auto s = run_args({"solve", "--matrix", path.string(), "--p", "2"});
  CHECK(s.status == 0);
  CHECK(fields(lines(s.out)[1])[0] == "64");
  std::filesystem::remove(path);
}

TEST_CASE("bench sweeps the grid") {
  const auto r = run_args({"bench", "--nx", "8", "--ny", "8", "--nz", "8", "--bench-lev", "1,2", "--bench-p", "2",
                           "--bench-k", "0,4"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "lev,n,n_p,k,fill,p-t,i-t,its");
  CHECK(fields(ls[4])[0] == "2");
  CHECK(fields(ls[4])[3] == "4");
  CHECK(run_args({"bench", "--bench-k", "x"}).status == 1);
}

TEST_CASE("errors give a diagnostic and a nonzero status") {
  const auto r = run_args({"solve", "--lev", "0", "--nx", "4", "--ny", "4", "--nz", "4"});
  CHECK(r.status == 1);
  CHECK(r.err.find("levels") != std::string::npos);
  const char* argv[] = {"schurlr", "solve", "--not-a-flag"};
  std::ostringstream out, err;
  CHECK(main_entry(3, argv, out, err) != 0);
  const char* none[] = {"schurlr"};
  CHECK(main_entry(1, none, out, err) != 0);
}

TEST_CASE("every flag round-trips through the config file") {
  const RunConfig c = parse_args({"solve",           "--problem",    "laplace2d", "--nx",          "7",
                                  "--ny",            "5",            "--nz",      "3",             "--gamma",
                                  "0.25",            "--shift",      "1.5",       "--lo",          "-1",
                                  "--hi",            "7.5",          "--lev",     "3",             "--p",
                                  "6",               "--k",          "7",         "--tau",         "0.003",
                                  "--lfil",          "33",           "--max-cycles", "4",          "--root-iters",
                                  "0",               "--shift-factor", "0.1",     "--last-blocks", "2",
                                  "--restart",       "30",           "--tol",     "1e-9",          "--maxit",
                                  "77",              "--ts",         "2e-6",      "--tw",          "3e-9",
                                  "--tc",            "4e-11",        "--output",  "out.csv",       "--history",
                                  "h.csv",           "--level-stats", "l.csv",    "--bench-lev",   "1,3",
                                  "--bench-p",       "2,8",          "--bench-k", "0,5,9",         "--poles",
                                  "6",               "--radius",     "1.1",       "--a",           "-3",
                                  "--b",             "4",            "--spectrum", "s.csv",        "--spectrum-points",
                                  "17",              "--kernel",     "spmv",      "--n",           "123",
                                  "--matrix",        "m.mtx"});
  const std::string text = to_config(c);
  const auto path = temp_file("roundtrip.cfg");
  {
    std::ofstream f(path);
    f << text;
  }
  const RunConfig back = parse_args({"solve", "--config", path.string()});
  CHECK(to_config(back) == text);
  CHECK(back.mslr.tau == 0.003);
  CHECK(back.krylov.tol == 1e-9);
  CHECK(back.bench_k == "0,5,9");
  CHECK(back.problem.matrix == "m.mtx");
  // flags override the file
  CHECK(parse_args({"solve", "--config", path.string(), "--k", "1"}).mslr.rank == 1);
  // defaults round-trip too
  const std::string def = to_config(parse_args({"solve"}));
  {
    std::ofstream f(path);
    f << def;
  }
  CHECK(to_config(parse_args({"solve", "--config", path.string()})) == def);
  std::filesystem::remove(path);
}

TEST_CASE("identical configs give identical output") {
  const auto path = temp_file("det.cfg");
  {
    std::ofstream f(path);
    f << "nx=10\nny=10\nnz=10\nk=5\nlev=2\n";
  }
  const auto a = run_args({"solve", "--config", path.string()});
  const auto b = run_args({"solve", "--config", path.string()});
  REQUIRE(a.status == 0);
  CHECK(deterministic_part(lines(a.out)[1]) == deterministic_part(lines(b.out)[1]));
  const auto d1 = run_args({"design-shifts", "--config", path.string()});
  const auto d2 = run_args({"design-shifts", "--config", path.string()});
  CHECK(d1.out == d2.out);
  const auto c1 = run_args({"cost-report", "--kernel", "spmv", "--config", path.string()});
  const auto c2 = run_args({"cost-report", "--kernel", "spmv", "--config", path.string()});
  CHECK(c1.out == c2.out);
  std::filesystem::remove(path);
}
