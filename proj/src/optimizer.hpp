#pragma once

#include "evaluators.hpp"

namespace wetfb {

// Evaluator driving the optimization loops; the certification pass always
// uses exact-Q quadrature regardless.
enum class LoopEvaluator { closed_form, quadrature_exact, quadrature_linearized };

struct OptimizationResult {
  double eps_target = 0.0;
  long long v_star = 0;
  long long n_star = 0;
  long long delta_star = 0;
  double delta_seconds = 0.0;
  double nu = 0.0;
  double eps_achieved = 1.0;   // loop evaluator's value at the optimum
  double eps_certified = 1.0;  // exact-Q quadrature at the optimum
  bool feasible = false;
  EvalMethod evaluator = EvalMethod::closed_form;
  double best_eps_found = 1.0;  // smallest eps seen; meaningful when infeasible
};

struct WetSearchResult {
  long long v_star = 0;
  bool feasible = false;
  double eps_at_v = 1.0;  // evaluator value at v_star when feasible
  double best_eps = 1.0;  // smallest eps seen (at v_max when infeasible)
};

// Smallest integer v with eps(v, n, k) <= eps0: exponential bracketing from
// v = n, then integer bisection (eps is nonincreasing in v).
WetSearchResult min_wet_blocklength(const SystemParams& params, long long k, long long n,
                                    double eps0,
                                    LoopEvaluator evaluator = LoopEvaluator::closed_form,
                                    long long v_max = 1000000000LL);

// Minimize delta(n) = n + v*(n) over n in [n_min, n_max]. n_step = 0 scans a
// ~40-point geometric grid and then every integer between the coarse
// minimum's neighbors; n_step > 0 scans exactly the arithmetic grid.
// Ties break toward smaller n, then smaller v.
OptimizationResult min_delay(const SystemParams& params, long long k, double eps0,
                             long long n_min, long long n_max, long long n_step = 0,
                             LoopEvaluator evaluator = LoopEvaluator::closed_form,
                             long long v_max = 1000000000LL, bool certify = true);

struct FixedDelayResult {
  double eps_star = 1.0;
  long long n_star = 0;
  long long v_star = 0;
  double nu = 0.0;
  double eps_certified = 1.0;
};

// Minimize eps(v = delta - n, n, k) over integer n in [n_floor, delta-1].
FixedDelayResult min_error_given_delay(const SystemParams& params, long long k, long long delta,
                                       long long n_floor = 1,
                                       LoopEvaluator evaluator = LoopEvaluator::closed_form,
                                       bool certify = true);

struct FixedPowerResult {
  double p_hat_star = 0.0;
  double eps_star = 1.0;
  long long n_star = 0;
};

// Joint minimum of the fixed-power error over n in [n_floor, delta-1] and a
// logarithmic transmit-power grid with local refinement; the power grid
// auto-expands when the optimum lands on a boundary.
FixedPowerResult best_fixed_power(const SystemParams& params, long long k, long long delta,
                                  long long n_floor = 1, double p_min = 1e-9,
                                  double p_max = 1.0);

}  // namespace wetfb
