#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "csv.hpp"
#include "scenario.hpp"
#include "wetfb/wetfb.h"

namespace {

using wetfb_cli::CsvWriter;
using wetfb_cli::fmt_int;
using wetfb_cli::fmt_real;
using wetfb_cli::Scenario;
using wetfb_cli::ScenarioError;

// Invalid-input failures are config mistakes (exit 2); everything else that
// the library reports is an analytic failure (exit 1).
void check(wetfb_status st, const std::string& what) {
  if (st == WETFB_OK) return;
  const std::string msg = what + ": " + wetfb_last_error();
  if (st == WETFB_ERR_INVALID) throw ScenarioError(msg);
  throw std::runtime_error(msg);
}

struct ParamsHandle {
  wetfb_params* p = nullptr;
  explicit ParamsHandle(const wetfb_params_spec& spec) {
    check(wetfb_params_create(&spec, &p), "params_create");
  }
  ~ParamsHandle() { wetfb_params_destroy(p); }
  ParamsHandle(const ParamsHandle&) = delete;
  ParamsHandle& operator=(const ParamsHandle&) = delete;
};

// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure
// after all workers join, so partial output never escapes silently.
void run_parallel(size_t count, int jobs, const std::function<void(size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(count);
  std::vector<char> failed(count, 0);
  auto body = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < count; ++i)
    if (failed[i]) throw std::runtime_error("sweep point " + std::to_string(i) + ": " + errors[i]);
}

std::vector<long long> n_grid(const Scenario& sc) {
  std::vector<long long> ns;
  if (sc.n_min < 1 || sc.n_max < sc.n_min)
    throw ScenarioError("need 1 <= n_min <= n_max for the n grid");
  if (sc.n_step > 0) {
    for (long long n = sc.n_min; n <= sc.n_max; n += sc.n_step) ns.push_back(n);
  } else {
    const long long points = std::max<long long>(2, sc.n_points);
    const double lo = std::log(static_cast<double>(sc.n_min));
    const double hi = std::log(static_cast<double>(sc.n_max));
    for (long long i = 0; i < points; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(points - 1);
      const long long n = std::llround(std::exp(lo + f * (hi - lo)));
      ns.push_back(std::clamp(n, sc.n_min, sc.n_max));
    }
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  }
  return ns;
}

std::string resolved_out(const Scenario& sc, const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (!sc.out.empty()) return sc.out;
  throw ScenarioError("missing output path: set config key 'out' or pass --out");
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%s = %s\n", key, value.c_str());
}

int cmd_eval(const Scenario& sc, long long v, long long n, int jobs) {
  ParamsHandle h(sc.params_spec());

  wetfb_linearization lin{};
  check(wetfb_linearization_info(h.p, v, n, sc.k_bits, &lin), "linearization_info");

  wetfb_estimate mc{}, qx{}, ql{}, cf{}, as{};
  check(wetfb_eps_monte_carlo(h.p, v, n, sc.k_bits, sc.mc_samples, sc.seed, sc.mc_shards,
                              jobs, &mc),
        "eps_monte_carlo");
  check(wetfb_eps_quadrature(h.p, v, n, sc.k_bits, 1, sc.quad_rel_tol, &qx),
        "eps_quadrature(exact)");
  check(wetfb_eps_quadrature(h.p, v, n, sc.k_bits, 0, sc.quad_rel_tol, &ql),
        "eps_quadrature(linearized)");
  check(wetfb_eps_closed_form(h.p, v, n, sc.k_bits, &cf), "eps_closed_form");
  check(wetfb_eps_outage_asymptotic(h.p, v, n, sc.k_bits, &as), "eps_outage_asymptotic");

  print_kv("v", fmt_int(v));
  print_kv("n", fmt_int(n));
  print_kv("k", fmt_int(sc.k_bits));
  print_kv("mu", fmt_real(lin.mu));
  print_kv("r", fmt_real(lin.rate));
  print_kv("delay", fmt_int(lin.delay));
  print_kv("delay_seconds", fmt_real(lin.delay_seconds));
  print_kv("nu", fmt_real(lin.time_share));
  print_kv("theta", fmt_real(lin.theta));
  print_kv("beta", fmt_real(lin.beta));
  print_kv("varrho", fmt_real(lin.varrho));
  print_kv("vartheta", fmt_real(lin.vartheta));
  print_kv("zeta2", fmt_real(lin.zeta2));
  print_kv("xi2", fmt_real(lin.xi2));
  print_kv("clamped", fmt_int(lin.clamped));
  print_kv("small_n_warning", fmt_int(lin.small_n_warning));
  print_kv("eps_mc", fmt_real(mc.value));
  print_kv("mc_stderr", fmt_real(mc.uncertainty));
  print_kv("eps_quad_exact", fmt_real(qx.value));
  print_kv("eps_quad_lin", fmt_real(ql.value));
  print_kv("eps_closed", fmt_real(cf.value));
  print_kv("closed_fallback", fmt_int(cf.fallback_used));
  print_kv("eps_asymptotic", fmt_real(as.value));
  return 0;
}

int cmd_validate(const Scenario& sc, const std::string& out_flag, int jobs) {
  const std::string out = resolved_out(sc, out_flag);
  if (sc.grid_m.empty()) throw ScenarioError("empty grid list 'grid_m'");
  if (sc.grid_k.empty()) throw ScenarioError("empty grid list 'grid_k'");
  if (sc.grid_n.empty()) throw ScenarioError("empty grid list 'grid_n'");
  if (sc.grid_eps.empty()) throw ScenarioError("empty grid list 'grid_eps'");

  struct Point {
    double m;
    long long k, n;
    double eps;
  };
  std::vector<Point> points;
  for (double m : sc.grid_m)
    for (long long k : sc.grid_k)
      for (long long n : sc.grid_n)
        for (double eps : sc.grid_eps) points.push_back({m, k, n, eps});

  std::vector<std::vector<std::string>> rows(points.size());
  std::vector<char> violation(points.size(), 0);

  run_parallel(points.size(), jobs, [&](size_t i) {
    const Point& pt = points[i];
    wetfb_params_spec spec = sc.params_spec();
    spec.m = pt.m;
    ParamsHandle h(spec);

    // Pick v so the operating point sits at the requested error level; the
    // evaluator identity below holds at any v, so an unreachable target just
    // pins v at the cap.
    wetfb_opt_result wr{};
    check(wetfb_min_wet_blocklength(h.p, pt.k, pt.n, pt.eps, WETFB_EVAL_QUAD_LINEARIZED,
                                    sc.v_max, &wr),
          "min_wet_blocklength");
    const long long v = wr.feasible ? wr.v_star : sc.v_max;

    wetfb_linearization lin{};
    check(wetfb_linearization_info(h.p, v, pt.n, pt.k, &lin), "linearization_info");

    wetfb_estimate mc{}, qx{}, ql{}, cf{};
    check(wetfb_eps_monte_carlo(h.p, v, pt.n, pt.k, sc.mc_samples,
                                sc.seed + static_cast<unsigned long long>(i), sc.mc_shards, 1,
                                &mc),
          "eps_monte_carlo");
    check(wetfb_eps_quadrature(h.p, v, pt.n, pt.k, 1, sc.quad_rel_tol, &qx),
          "eps_quadrature(exact)");
    check(wetfb_eps_quadrature(h.p, v, pt.n, pt.k, 0, sc.quad_rel_tol, &ql),
          "eps_quadrature(linearized)");
    check(wetfb_eps_closed_form(h.p, v, pt.n, pt.k, &cf), "eps_closed_form");

    const double ratio = (cf.value > 0.0 && qx.value > 0.0)
                             ? std::log10(cf.value / qx.value)
                             : std::numeric_limits<double>::quiet_NaN();

    if (!cf.fallback_used) {
      const double rel = std::abs(cf.value - ql.value) / std::max(std::abs(ql.value), DBL_MIN);
      if (!(rel <= 1e-6)) violation[i] = 1;
    }

    std::string flags;
    const auto add_flag = [&flags](const char* f) {
      if (!flags.empty()) flags += ';';
      flags += f;
    };
    if (lin.clamped) add_flag("clamped");
    if (cf.fallback_used) add_flag("fallback");
    if (lin.small_n_warning) add_flag("small_n");
    if (!wr.feasible) add_flag("target_infeasible");
    if (flags.empty()) flags = "-";

    rows[i] = {fmt_real(pt.m),    fmt_int(pt.k),      fmt_int(pt.n),   fmt_int(v),
               fmt_real(mc.value), fmt_real(mc.uncertainty), fmt_real(qx.value),
               fmt_real(ql.value), fmt_real(cf.value), fmt_real(ratio), flags};
  });

  CsvWriter csv({"m", "k", "n", "v", "eps_mc", "mc_stderr", "eps_quad_exact", "eps_quad_lin",
                 "eps_closed", "log10_ratio_closed_vs_exact", "flags"});
  for (auto& r : rows) csv.add_row(std::move(r));
  csv.write(out);

  const long long bad = std::count(violation.begin(), violation.end(), char(1));
  if (bad > 0) {
    std::fprintf(stderr,
                 "validate: closed form vs linearized quadrature identity failed on %lld of "
                 "%zu points (rel > 1e-6)\n",
                 bad, points.size());
    return 1;
  }
  return 0;
}

int sweep_delay_vs_n(const Scenario& sc, const std::string& out, int jobs) {
  const std::vector<double> eps_list =
      sc.eps0_list.empty() ? std::vector<double>{sc.eps_target} : sc.eps0_list;
  const std::vector<long long> ns = n_grid(sc);

  struct Point {
    double eps0;
    long long n;
  };
  std::vector<Point> points;
  for (double e : eps_list)
    for (long long n : ns) points.push_back({e, n});

  std::vector<std::vector<std::string>> rows(points.size());
  std::atomic<long long> feasible_count{0};

  // Rows land at their own index, so output order (and bytes) is independent
  // of the worker count.
  run_parallel(points.size(), jobs, [&](size_t i) {
    const Point& pt = points[i];
    ParamsHandle h(sc.params_spec());
    wetfb_opt_result r{};
    check(wetfb_min_wet_blocklength(h.p, sc.k_bits, pt.n, pt.eps0, WETFB_EVAL_CLOSED_FORM,
                                    sc.v_max, &r),
          "min_wet_blocklength");
    if (r.feasible) feasible_count.fetch_add(1);
    rows[i] = {fmt_real(pt.eps0),        fmt_int(sc.k_bits),     fmt_int(pt.n),
               fmt_int(r.v_star),        fmt_int(r.delta_star),  fmt_real(r.delta_seconds),
               fmt_real(r.nu),           fmt_real(r.eps_achieved), fmt_int(r.feasible)};
  });

  CsvWriter csv({"eps_target", "k", "n", "v_star", "delta", "delta_seconds", "nu",
                 "eps_achieved", "feasible"});
  for (auto& r : rows) csv.add_row(std::move(r));
  csv.write(out);

  if (feasible_count.load() == 0) {
    std::fprintf(stderr, "sweep: no feasible point in delay_vs_n\n");
    return 1;
  }
  return 0;
}

int sweep_min_delay_vs_k(const Scenario& sc, const std::string& out, int jobs) {
  const std::vector<long long> ks =
      sc.k_list.empty() ? std::vector<long long>{sc.k_bits} : sc.k_list;

  std::vector<std::vector<std::string>> rows(ks.size());
  std::atomic<long long> feasible_count{0};

  run_parallel(ks.size(), jobs, [&](size_t i) {
    ParamsHandle h(sc.params_spec());
    wetfb_opt_result r{};
    check(wetfb_min_delay(h.p, ks[i], sc.eps_target, sc.n_min, sc.n_max, sc.n_step,
                          WETFB_EVAL_CLOSED_FORM, sc.v_max, &r),
          "min_delay");
    if (r.feasible) feasible_count.fetch_add(1);
    rows[i] = {fmt_real(sc.eps_target),  fmt_int(ks[i]),        fmt_int(r.n_star),
               fmt_int(r.v_star),        fmt_int(r.delta_star), fmt_real(r.delta_seconds),
               fmt_real(r.nu),           fmt_real(r.eps_achieved), fmt_real(r.eps_certified),
               fmt_int(r.feasible)};
  });

  CsvWriter csv({"eps_target", "k", "n_star", "v_star", "delta_star", "delta_seconds", "nu",
                 "eps_achieved", "eps_certified", "feasible"});
  for (auto& r : rows) csv.add_row(std::move(r));
  csv.write(out);

  if (feasible_count.load() == 0) {
    std::fprintf(stderr, "sweep: no feasible point in min_delay_vs_k\n");
    return 1;
  }
  return 0;
}

std::vector<long long> delta_grid(const Scenario& sc) {
  if (!sc.delta_list.empty()) return sc.delta_list;
  if (sc.delta > 0) return {sc.delta};
  throw ScenarioError("missing required config key 'delta_list' (or scalar 'delta')");
}

int sweep_eps_vs_delta(const Scenario& sc, const std::string& out, int jobs) {
  const std::vector<long long> deltas = delta_grid(sc);
  std::vector<std::vector<std::string>> rows(deltas.size());

  run_parallel(deltas.size(), jobs, [&](size_t i) {
    ParamsHandle h(sc.params_spec());
    wetfb_opt_result r{};
    check(wetfb_min_error_given_delay(h.p, sc.k_bits, deltas[i], sc.n_floor,
                                      WETFB_EVAL_CLOSED_FORM, &r),
          "min_error_given_delay");
    rows[i] = {fmt_int(sc.k_bits),      fmt_int(deltas[i]), fmt_real(r.delta_seconds),
               fmt_int(r.n_star),       fmt_int(r.v_star),  fmt_real(r.nu),
               fmt_real(r.eps_achieved), fmt_real(r.eps_certified)};
  });

  CsvWriter csv({"k", "delta", "delta_seconds", "n_star", "v_star", "nu", "eps_star",
                 "eps_certified"});
  for (auto& r : rows) csv.add_row(std::move(r));
  csv.write(out);
  return 0;
}

int sweep_fixed_power_vs_delta(const Scenario& sc, const std::string& out, int jobs) {
  const std::vector<long long> deltas = delta_grid(sc);
  std::vector<std::vector<std::string>> rows(deltas.size());

  run_parallel(deltas.size(), jobs, [&](size_t i) {
    ParamsHandle h(sc.params_spec());
    wetfb_opt_result r{};
    double p_hat = 0.0;
    check(wetfb_best_fixed_power(h.p, sc.k_bits, deltas[i], sc.n_floor, sc.p_min_w, sc.p_max_w,
                                 &p_hat, &r),
          "best_fixed_power");
    rows[i] = {fmt_int(sc.k_bits), fmt_int(deltas[i]),  fmt_real(r.delta_seconds),
               fmt_int(r.n_star),  fmt_real(p_hat),     fmt_real(r.eps_achieved)};
  });

  CsvWriter csv({"k", "delta", "delta_seconds", "n_star", "p_hat_star_w", "eps_star"});
  for (auto& r : rows) csv.add_row(std::move(r));
  csv.write(out);
  return 0;
}

int cmd_sweep(const Scenario& sc, const std::string& mode, const std::string& out_flag,
              int jobs) {
  const std::string out = resolved_out(sc, out_flag);
  if (mode == "delay_vs_n") return sweep_delay_vs_n(sc, out, jobs);
  if (mode == "min_delay_vs_k") return sweep_min_delay_vs_k(sc, out, jobs);
  if (mode == "eps_vs_delta") return sweep_eps_vs_delta(sc, out, jobs);
  if (mode == "fixed_power_vs_delta") return sweep_fixed_power_vs_delta(sc, out, jobs);
  throw ScenarioError("unknown sweep mode '" + mode +
                      "' (expected delay_vs_n, min_delay_vs_k, eps_vs_delta, or "
                      "fixed_power_vs_delta)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-blocklength error probability and blocklength optimization for a "
               "wireless-powered link under Nakagami-m fading"};
  app.require_subcommand(1);

  std::string config_path, out_path, mode;
  long long v = 0, n = 0;
  long long seed_flag = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config file (key = value)")->required();
    sub->add_option("--out", out_path, "output CSV path (overrides config 'out')");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--seed", seed_flag, "RNG seed (overrides config 'seed')");
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate one (v, n) allocation");
  add_common(eval);
  eval->add_option("--v", v, "energy (WET) channel uses")->required();
  eval->add_option("--n", n, "information (WIT) channel uses")->required();

  CLI::App* validate = app.add_subcommand(
      "validate", "cross-check all error-probability evaluators on a grid");
  add_common(validate);

  CLI::App* sweep = app.add_subcommand("sweep", "optimization sweeps, CSV output");
  add_common(sweep);
  sweep->add_option("--mode", mode,
                    "delay_vs_n | min_delay_vs_k | eps_vs_delta | fixed_power_vs_delta")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are config errors
  }

  try {
    Scenario sc = wetfb_cli::load_scenario(config_path);
    if (eval->count("--seed") || validate->count("--seed") || sweep->count("--seed"))
      sc.seed = static_cast<unsigned long long>(seed_flag);
    if (jobs < 1) throw ScenarioError("--jobs must be >= 1");

    if (eval->parsed()) return cmd_eval(sc, v, n, jobs);
    if (validate->parsed()) return cmd_validate(sc, out_path, jobs);
    return cmd_sweep(sc, mode, out_path, jobs);
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
