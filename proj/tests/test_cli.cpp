#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/csv.hpp"

namespace {

std::string cli_bin() {
  const char* p = std::getenv("WETFB_CLI_BIN");
  REQUIRE(p != nullptr);
  return p;
}

std::string work_dir() {
  static std::string dir = [] {
    std::string d = "/tmp/wetfb_cli_test_" + std::to_string(::getpid());
    if (std::system(("mkdir -p " + d).c_str()) != 0) d = "/tmp";
    return d;
  }();
  return dir;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  REQUIRE(os.good());
  os << content;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool file_exists(const std::string& path) {
  std::ifstream is(path);
  return is.good();
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const std::string out = work_dir() + "/stdout.txt";
  const std::string err = work_dir() + "/stderr.txt";
  const std::string cmd = cli_bin() + " " + args + " > " + out + " 2> " + err;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return RunResult{WEXITSTATUS(rc), slurp(out), slurp(err)};
}

// Common physics block; linear-unit keys so no dB conversion is involved.
std::string base_config() {
  return "m = 3\n"
         "eta = 0.5\n"
         "alpha = 3\n"
         "d_m = 12\n"
         "kappa = 1000\n"
         "p_d_w = 1\n"
         "sigma2_d_w = 1e-14\n"
         "t_c_s = 3e-6\n"
         "k_bits = 216\n";
}

std::string make_config(const std::string& name, const std::string& extra) {
  const std::string path = work_dir() + "/" + name;
  write_file(path, base_config() + extra);
  return path;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find(" = ");
    if (pos == std::string::npos) continue;
    kv[line.substr(0, pos)] = line.substr(pos + 3);
  }
  return kv;
}

double as_real(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  REQUIRE(it != kv.end());
  return std::strtod(it->second.c_str(), nullptr);
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("csv cell quoting follows RFC 4180") {
  using wetfb_cli::csv_quote;
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("3.25e-05") == "3.25e-05");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_quote("") == "");
}

TEST_CASE("csv number formatting round-trips doubles exactly") {
  using wetfb_cli::fmt_int;
  using wetfb_cli::fmt_real;
  for (double x : {1.0, 1e-5, 0.1 + 0.2, 1.860544e1, 9.9e-3, 3300.0 * 3e-6, -0.0}) {
    CHECK(std::strtod(fmt_real(x).c_str(), nullptr) == x);
  }
  CHECK(fmt_int(0) == "0");
  CHECK(fmt_int(-5) == "-5");
  CHECK(fmt_int(1234567890123LL) == "1234567890123");
}

TEST_CASE("csv writer emits newline-terminated rows atomically") {
  wetfb_cli::CsvWriter csv({"a", "b"});
  csv.add_row({"1", "x,y"});
  CHECK_THROWS_AS(csv.add_row({"too", "many", "cells"}), std::runtime_error);
  const std::string path = work_dir() + "/unit.csv";
  csv.write(path);
  CHECK(slurp(path) == "a,b\n1,\"x,y\"\n");
  CHECK_FALSE(file_exists(path + ".tmp"));
}

TEST_CASE("eval prints a consistent report and exits zero") {
  const std::string cfg = make_config("eval.cfg", "mc_samples = 5000\nseed = 11\n");
  const RunResult r = run_cli("eval --config " + cfg + " --v 3000 --n 300");
  REQUIRE(r.exit_code == 0);

  const auto kv = parse_kv(r.out);
  CHECK(as_real(kv, "v") == 3000.0);
  CHECK(as_real(kv, "n") == 300.0);
  CHECK(as_real(kv, "k") == 216.0);
  CHECK(as_real(kv, "delay") == 3300.0);
  CHECK(as_real(kv, "mu") == doctest::Approx(18.60544).epsilon(1e-5));
  CHECK(as_real(kv, "r") == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(as_real(kv, "nu") == doctest::Approx(3000.0 / 3300.0).epsilon(1e-12));
  CHECK(as_real(kv, "small_n_warning") == 0.0);
  CHECK(as_real(kv, "clamped") == 0.0);
  CHECK(as_real(kv, "closed_fallback") == 0.0);

  // Closed form against linearized quadrature, straight from the report.
  const double cf = as_real(kv, "eps_closed");
  const double ql = as_real(kv, "eps_quad_lin");
  const double qx = as_real(kv, "eps_quad_exact");
  REQUIRE(ql > 0.0);
  CHECK(std::abs(cf - ql) / ql < 1e-6);
  CHECK(std::abs(std::log10(cf / qx)) < 0.1);
  CHECK(as_real(kv, "eps_asymptotic") > 0.0);
  CHECK(as_real(kv, "mc_stderr") >= 0.0);

  // Small-n advisory propagates.
  const RunResult small = run_cli("eval --config " + cfg + " --v 3000 --n 99");
  REQUIRE(small.exit_code == 0);
  CHECK(as_real(parse_kv(small.out), "small_n_warning") == 1.0);

  // Invalid allocation is a config-level error.
  const RunResult bad = run_cli("eval --config " + cfg + " --v 0 --n 300");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("eval --seed overrides the config seed") {
  const std::string cfg = make_config("seed.cfg", "mc_samples = 5000\nseed = 11\n");
  const RunResult a = run_cli("eval --config " + cfg + " --v 100 --n 300 --seed 5");
  const RunResult b = run_cli("eval --config " + cfg + " --v 100 --n 300 --seed 5");
  const RunResult c = run_cli("eval --config " + cfg + " --v 100 --n 300 --seed 6");
  REQUIRE(a.exit_code == 0);
  REQUIRE(c.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(parse_kv(a.out).at("eps_mc") != parse_kv(c.out).at("eps_mc"));
}

TEST_CASE("config errors name the offending key and exit 2") {
  // Missing required key.
  const std::string missing = work_dir() + "/missing.cfg";
  write_file(missing,
             "eta = 0.5\nalpha = 3\nd_m = 12\nkappa = 1000\np_d_w = 1\n"
             "sigma2_d_w = 1e-14\nt_c_s = 3e-6\nk_bits = 216\n");
  const RunResult m = run_cli("eval --config " + missing + " --v 10 --n 100");
  CHECK(m.exit_code == 2);
  CHECK(m.err.find("'m'") != std::string::npos);

  // Unknown key.
  const std::string unknown = make_config("unknown.cfg", "frobnicate = 7\n");
  const RunResult u = run_cli("eval --config " + unknown + " --v 10 --n 100");
  CHECK(u.exit_code == 2);
  CHECK(u.err.find("frobnicate") != std::string::npos);

  // Conflicting dual keys for the same quantity.
  const std::string dual = make_config("dual.cfg", "kappa_db = 30\n");
  const RunResult d = run_cli("eval --config " + dual + " --v 10 --n 100");
  CHECK(d.exit_code == 2);
  CHECK(d.err.find("kappa") != std::string::npos);

  // Unreadable config path.
  const RunResult g = run_cli("eval --config " + work_dir() + "/nope.cfg --v 10 --n 100");
  CHECK(g.exit_code == 2);

  // Missing required CLI option.
  const RunResult p = run_cli("eval --config " + unknown);
  CHECK(p.exit_code == 2);
}

TEST_CASE("validate cross-checks the evaluators and writes the canonical header") {
  const std::string out = work_dir() + "/validate.csv";
  const std::string cfg = make_config(
      "validate.cfg",
      "mc_samples = 2000\nmc_shards = 4\nseed = 42\nquad_rel_tol = 1e-9\n"
      "grid_m = 2,3\ngrid_k = 216\ngrid_n = 120\ngrid_eps = 1e-2\nout = " + out + "\n");
  const RunResult r = run_cli("validate --config " + cfg + " --jobs 1");
  REQUIRE(r.exit_code == 0);
  REQUIRE(file_exists(out));

  const std::string csv = slurp(out);
  CHECK(first_line(csv) ==
        "m,k,n,v,eps_mc,mc_stderr,eps_quad_exact,eps_quad_lin,eps_closed,"
        "log10_ratio_closed_vs_exact,flags");
  CHECK(count_lines(csv) == 3);  // header + 2 grid points

  // Empty grid list is a config error.
  const std::string empty = make_config("empty_grid.cfg", "grid_m =\nout = " + out + "\n");
  const RunResult e = run_cli("validate --config " + empty);
  CHECK(e.exit_code == 2);
  CHECK(e.err.find("grid_m") != std::string::npos);
}

TEST_CASE("sweep output bytes are independent of repetition and worker count") {
  const std::string out = work_dir() + "/delay_vs_n.csv";
  const std::string cfg = make_config(
      "sweep.cfg",
      "eps0_list = 1e-2,1e-3\nn_min = 100\nn_max = 140\nn_points = 3\n"
      "v_max = 100000\nout = " + out + "\n");

  REQUIRE(run_cli("sweep --mode delay_vs_n --config " + cfg + " --jobs 1").exit_code == 0);
  const std::string first = slurp(out);
  REQUIRE(run_cli("sweep --mode delay_vs_n --config " + cfg + " --jobs 1").exit_code == 0);
  const std::string second = slurp(out);
  REQUIRE(run_cli("sweep --mode delay_vs_n --config " + cfg + " --jobs 4").exit_code == 0);
  const std::string parallel = slurp(out);

  CHECK(first == second);
  CHECK(first == parallel);
  CHECK(first_line(first) ==
        "eps_target,k,n,v_star,delta,delta_seconds,nu,eps_achieved,feasible");
  CHECK(count_lines(first) >= 7);  // header + 2 targets x >= 3 grid points
}

TEST_CASE("remaining sweep modes run and unknown modes are rejected") {
  const std::string out = work_dir() + "/mode.csv";

  const std::string kcfg = make_config(
      "ksweep.cfg",
      "eps_target = 1e-3\nk_list = 96,216\nn_min = 100\nn_max = 200\nn_step = 25\n"
      "v_max = 100000\nout = " + out + "\n");
  REQUIRE(run_cli("sweep --mode min_delay_vs_k --config " + kcfg).exit_code == 0);
  CHECK(first_line(slurp(out)) ==
        "eps_target,k,n_star,v_star,delta_star,delta_seconds,nu,eps_achieved,"
        "eps_certified,feasible");
  CHECK(count_lines(slurp(out)) == 3);

  const std::string dcfg = make_config(
      "dsweep.cfg", "delta_list = 600,800\nn_floor = 1\nout = " + out + "\n");
  REQUIRE(run_cli("sweep --mode eps_vs_delta --config " + dcfg).exit_code == 0);
  CHECK(first_line(slurp(out)) ==
        "k,delta,delta_seconds,n_star,v_star,nu,eps_star,eps_certified");
  CHECK(count_lines(slurp(out)) == 3);

  const std::string fcfg = make_config(
      "fsweep.cfg", "delta = 600\np_min_w = 1e-9\np_max_w = 1\nout = " + out + "\n");
  REQUIRE(run_cli("sweep --mode fixed_power_vs_delta --config " + fcfg).exit_code == 0);
  CHECK(first_line(slurp(out)) == "k,delta,delta_seconds,n_star,p_hat_star_w,eps_star");
  CHECK(count_lines(slurp(out)) == 2);

  // No delta at all for a delta-indexed sweep.
  const std::string nocfg = make_config("nodelta.cfg", "out = " + out + "\n");
  CHECK(run_cli("sweep --mode eps_vs_delta --config " + nocfg).exit_code == 2);

  const RunResult bad = run_cli("sweep --mode bogus --config " + fcfg);
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("bogus") != std::string::npos);

  // Missing output destination (no 'out' key, no --out flag).
  const std::string noout = make_config("noout.cfg", "delta = 600\n");
  CHECK(run_cli("sweep --mode eps_vs_delta --config " + noout).exit_code == 2);

  // --out flag overrides the config key.
  const std::string flagged = work_dir() + "/flagged.csv";
  REQUIRE(run_cli("sweep --mode eps_vs_delta --config " + dcfg + " --out " + flagged)
              .exit_code == 0);
  CHECK(file_exists(flagged));
}

TEST_CASE("an entirely infeasible sweep exits 1") {
  const std::string out = work_dir() + "/infeasible.csv";
  const std::string cfg = make_config(
      "infeasible.cfg",
      "eps0_list = 1e-30\nn_min = 100\nn_max = 120\nn_points = 2\nv_max = 2000\n"
      "out = " + out + "\n");
  const RunResult r = run_cli("sweep --mode delay_vs_n --config " + cfg);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("feasible") != std::string::npos);
  CHECK(file_exists(out));  // rows are still written for inspection
}
