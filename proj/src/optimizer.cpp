#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wetfb {

namespace {

double eval_eps(const SystemParams& params, long long v, long long n, long long k,
                LoopEvaluator evaluator) {
  const BlockAllocation alloc{v, n, k};
  switch (evaluator) {
    case LoopEvaluator::closed_form:
      return eps_closed_form(params, alloc).value;
    case LoopEvaluator::quadrature_exact:
      return eps_quadrature(params, alloc, IntegrandKind::exact_q).value;
    case LoopEvaluator::quadrature_linearized:
      return eps_quadrature(params, alloc, IntegrandKind::linearized).value;
  }
  throw std::logic_error("eval_eps: unknown evaluator");
}

EvalMethod loop_method(LoopEvaluator evaluator) {
  switch (evaluator) {
    case LoopEvaluator::closed_form:
      return EvalMethod::closed_form;
    case LoopEvaluator::quadrature_exact:
      return EvalMethod::quadrature_exact;
    case LoopEvaluator::quadrature_linearized:
      return EvalMethod::quadrature_linearized;
  }
  throw std::logic_error("loop_method: unknown evaluator");
}

// Geometric integer grid of ~points values covering [lo, hi], both included.
std::vector<long long> geometric_grid(long long lo, long long hi, int points) {
  std::vector<long long> grid;
  if (lo > hi) return grid;
  if (points < 2 || hi - lo < points) {
    for (long long n = lo; n <= hi; ++n) grid.push_back(n);
    return grid;
  }
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
  for (int i = 0; i < points; ++i) {
    const double x = static_cast<double>(lo) * std::exp(ratio * i / (points - 1));
    const long long n = std::llround(x);
    if (grid.empty() || n > grid.back()) grid.push_back(std::clamp(n, lo, hi));
  }
  if (grid.back() != hi) grid.push_back(hi);
  return grid;
}

}  // namespace

WetSearchResult min_wet_blocklength(const SystemParams& params, long long k, long long n,
                                    double eps0, LoopEvaluator evaluator, long long v_max) {
  params.validate();
  if (!(eps0 > 0.0 && eps0 < 1.0)) {
    throw std::domain_error("min_wet_blocklength: eps0 must be in (0,1)");
  }
  if (n < 1 || k < 1) throw std::domain_error("min_wet_blocklength: n, k must be >= 1");
  if (v_max < 1) throw std::domain_error("min_wet_blocklength: v_max must be >= 1");

  WetSearchResult res;
  const double e1 = eval_eps(params, 1, n, k, evaluator);
  res.best_eps = e1;
  if (e1 <= eps0) {
    res.v_star = 1;
    res.feasible = true;
    res.eps_at_v = e1;
    return res;
  }

  // Bracket from v = n, doubling until feasible or the cap is hit.
  long long lo = 1;                       // eps(lo) > eps0
  long long hi = -1;                      // eps(hi) <= eps0 once found
  double eps_hi = 1.0;
  long long v = std::min(std::max(n, static_cast<long long>(2)), v_max);
  for (;;) {
    const double e = eval_eps(params, v, n, k, evaluator);
    res.best_eps = std::min(res.best_eps, e);
    if (e <= eps0) {
      hi = v;
      eps_hi = e;
      break;
    }
    lo = v;
    if (v >= v_max) break;
    v = std::min(v * 2, v_max);
  }
  if (hi < 0) {
    res.feasible = false;
    return res;
  }

  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    const double e = eval_eps(params, mid, n, k, evaluator);
    res.best_eps = std::min(res.best_eps, e);
    if (e <= eps0) {
      hi = mid;
      eps_hi = e;
    } else {
      lo = mid;
    }
  }
  res.v_star = hi;
  res.feasible = true;
  res.eps_at_v = eps_hi;
  return res;
}

OptimizationResult min_delay(const SystemParams& params, long long k, double eps0,
                             long long n_min, long long n_max, long long n_step,
                             LoopEvaluator evaluator, long long v_max, bool certify) {
  params.validate();
  if (n_min < 1 || n_min > n_max) throw std::domain_error("min_delay: need 1 <= n_min <= n_max");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::domain_error("min_delay: eps0 must be in (0,1)");
  if (n_step < 0) throw std::domain_error("min_delay: n_step must be >= 0");

  OptimizationResult out;
  out.eps_target = eps0;
  out.evaluator = loop_method(evaluator);

  struct Best {
    long long delta = -1, n = 0, v = 0;
    double eps = 1.0;
    bool better_than(long long delta2, long long n2) const {
      return delta < 0 || delta2 < delta || (delta2 == delta && n2 < n);
    }
  } best;
  double best_eps_found = 1.0;

  auto probe = [&](long long n) {
    const WetSearchResult w = min_wet_blocklength(params, k, n, eps0, evaluator, v_max);
    best_eps_found = std::min(best_eps_found, w.feasible ? w.eps_at_v : w.best_eps);
    if (!w.feasible) return;
    const long long delta = n + w.v_star;
    if (best.better_than(delta, n)) best = {delta, n, w.v_star, w.eps_at_v};
  };

  std::vector<long long> grid;
  if (n_step > 0) {
    for (long long n = n_min; n <= n_max; n += n_step) grid.push_back(n);
  } else {
    grid = geometric_grid(n_min, n_max, 40);
  }
  for (long long n : grid) probe(n);

  if (best.delta >= 0 && n_step == 0) {
    // Every integer between the coarse minimum's grid neighbors.
    const auto it = std::lower_bound(grid.begin(), grid.end(), best.n);
    const long long lo = (it == grid.begin()) ? n_min : *(it - 1) + 1;
    const long long hi = (it + 1 == grid.end()) ? n_max : *(it + 1) - 1;
    for (long long n = lo; n <= hi; ++n) {
      if (!std::binary_search(grid.begin(), grid.end(), n)) probe(n);
    }
  }

  out.best_eps_found = best_eps_found;
  if (best.delta < 0) {
    out.feasible = false;
    out.eps_achieved = best_eps_found;
    out.eps_certified = std::nan("");
    return out;
  }
  out.feasible = true;
  out.v_star = best.v;
  out.n_star = best.n;
  out.delta_star = best.delta;
  out.delta_seconds = static_cast<double>(best.delta) * params.t_c;
  out.nu = static_cast<double>(best.v) / static_cast<double>(best.delta);
  out.eps_achieved = best.eps;
  out.eps_certified =
      certify ? eps_quadrature(params, {best.v, best.n, k}, IntegrandKind::exact_q).value
              : std::nan("");
  return out;
}

FixedDelayResult min_error_given_delay(const SystemParams& params, long long k, long long delta,
                                       long long n_floor, LoopEvaluator evaluator, bool certify) {
  params.validate();
  if (delta < 2) throw std::domain_error("min_error_given_delay: delta must be >= 2");
  if (n_floor < 1) throw std::domain_error("min_error_given_delay: n_floor must be >= 1");
  const long long n_lo = std::min(n_floor, delta - 1);
  const long long n_hi = delta - 1;

  FixedDelayResult res;
  auto probe = [&](long long n) {
    const double e = eval_eps(params, delta - n, n, k, evaluator);
    if (e < res.eps_star || res.n_star == 0) {
      res.eps_star = e;
      res.n_star = n;
      res.v_star = delta - n;
    }
  };

  constexpr long long kExhaustiveCap = 20000;
  if (n_hi - n_lo + 1 <= kExhaustiveCap) {
    for (long long n = n_lo; n <= n_hi; ++n) probe(n);
  } else {
    const std::vector<long long> grid = geometric_grid(n_lo, n_hi, 128);
    for (long long n : grid) probe(n);
    const auto it = std::lower_bound(grid.begin(), grid.end(), res.n_star);
    const long long lo = (it == grid.begin()) ? n_lo : *(it - 1) + 1;
    const long long hi = (it + 1 == grid.end()) ? n_hi : *(it + 1) - 1;
    for (long long n = lo; n <= hi; ++n) {
      if (!std::binary_search(grid.begin(), grid.end(), n)) probe(n);
    }
  }

  res.nu = static_cast<double>(res.v_star) / static_cast<double>(delta);
  res.eps_certified =
      certify
          ? eps_quadrature(params, {res.v_star, res.n_star, k}, IntegrandKind::exact_q).value
          : std::nan("");
  return res;
}

FixedPowerResult best_fixed_power(const SystemParams& params, long long k, long long delta,
                                  long long n_floor, double p_min, double p_max) {
  params.validate();
  if (delta < 2) throw std::domain_error("best_fixed_power: delta must be >= 2");
  if (!(p_min > 0.0 && p_max > p_min)) {
    throw std::domain_error("best_fixed_power: need 0 < p_min < p_max");
  }
  const long long n_lo = std::min(std::max(n_floor, static_cast<long long>(1)), delta - 1);
  const long long n_hi = delta - 1;

  auto eval = [&](long long n, double p) {
    return eps_fixed_power(params, {delta - n, n, k}, p).value;
  };

  FixedPowerResult best;
  constexpr int kPerDecade = 8;
  const std::vector<long long> n_grid = geometric_grid(n_lo, n_hi, 24);

  // Coarse scan; expand the power range while the optimum sits on an edge.
  double lo = p_min, hi = p_max;
  for (int round = 0; round < 8; ++round) {
    const int decades = static_cast<int>(std::ceil(std::log10(hi / lo)));
    const int np = std::max(2, decades * kPerDecade + 1);
    std::vector<double> p_grid(np);
    for (int i = 0; i < np; ++i) {
      p_grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (np - 1));
    }
    best = FixedPowerResult{};
    std::size_t best_pi = 0;
    for (long long n : n_grid) {
      for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        const double e = eval(n, p_grid[pi]);
        if (best.n_star == 0 || e < best.eps_star) {
          best = {p_grid[pi], e, n};
          best_pi = pi;
        }
      }
    }
    const bool at_lo = best_pi == 0;
    const bool at_hi = best_pi + 1 == p_grid.size();
    if (!at_lo && !at_hi) break;
    if (at_lo) lo = std::max(lo * 1e-3, 1e-30);
    if (at_hi) hi = hi * 1e3;
  }

  // Refine: integer n window around the coarse best, golden section on
  // log p within one coarse grid step.
  const auto it = std::lower_bound(n_grid.begin(), n_grid.end(), best.n_star);
  long long win_lo = (it == n_grid.begin()) ? n_lo : *(it - 1);
  long long win_hi = (it + 1 == n_grid.end()) ? n_hi : *(it + 1);
  const std::vector<long long> n_fine =
      geometric_grid(win_lo, win_hi, 32);

  const double step = std::pow(10.0, 1.0 / kPerDecade);
  auto golden_p = [&](long long n, double pc) {
    double a = std::log(pc / step), b = std::log(pc * step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(n, std::exp(x1)), f2 = eval(n, std::exp(x2));
    for (int i = 0; i < 24; ++i) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = eval(n, std::exp(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = eval(n, std::exp(x2));
      }
    }
    const double p = std::exp(0.5 * (a + b));
    return std::make_pair(p, eval(n, p));
  };

  for (long long n : n_fine) {
    const auto [p, e] = golden_p(n, best.p_hat_star);
    if (e < best.eps_star) best = {p, e, n};
  }
  return best;
}

}  // namespace wetfb
