#include "wetfb/wetfb.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <new>
#include <stdexcept>

#include "evaluators.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "random.hpp"

namespace {

thread_local char tl_error_msg[256] = {0};

void set_error(const char* msg) {
  std::snprintf(tl_error_msg, sizeof(tl_error_msg), "%s", msg);
}

// Maps C++ exceptions from the core onto status codes.
template <typename Fn>
wetfb_status guarded(Fn&& fn) {
  try {
    fn();
    return WETFB_OK;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return WETFB_ERR_INVALID;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return WETFB_ERR_NO_CONVERGENCE;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return WETFB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return WETFB_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return WETFB_ERR_INTERNAL;
  }
}

int method_tag(wetfb::EvalMethod m) {
  switch (m) {
    case wetfb::EvalMethod::monte_carlo: return WETFB_METHOD_MONTE_CARLO;
    case wetfb::EvalMethod::quadrature_exact: return WETFB_METHOD_QUAD_EXACT;
    case wetfb::EvalMethod::quadrature_linearized: return WETFB_METHOD_QUAD_LINEARIZED;
    case wetfb::EvalMethod::closed_form: return WETFB_METHOD_CLOSED_FORM;
    case wetfb::EvalMethod::asymptotic: return WETFB_METHOD_ASYMPTOTIC;
    case wetfb::EvalMethod::fixed_power: return WETFB_METHOD_FIXED_POWER;
  }
  return WETFB_METHOD_CLOSED_FORM;
}

wetfb::LoopEvaluator loop_evaluator(int tag) {
  switch (tag) {
    case WETFB_EVAL_CLOSED_FORM: return wetfb::LoopEvaluator::closed_form;
    case WETFB_EVAL_QUAD_EXACT: return wetfb::LoopEvaluator::quadrature_exact;
    case WETFB_EVAL_QUAD_LINEARIZED: return wetfb::LoopEvaluator::quadrature_linearized;
    default: throw std::domain_error("unknown evaluator tag");
  }
}

void fill_estimate(const wetfb::ErrorProbEstimate& e, wetfb_estimate* out) {
  out->value = e.value;
  out->uncertainty = e.uncertainty;
  out->method = method_tag(e.method);
  out->fallback_used = e.fallback_used ? 1 : 0;
}

void fill_opt(const wetfb::OptimizationResult& r, wetfb_opt_result* out) {
  out->eps_target = r.eps_target;
  out->v_star = r.v_star;
  out->n_star = r.n_star;
  out->delta_star = r.delta_star;
  out->delta_seconds = r.delta_seconds;
  out->nu = r.nu;
  out->eps_achieved = r.eps_achieved;
  out->eps_certified = r.eps_certified;
  out->feasible = r.feasible ? 1 : 0;
  out->evaluator = r.evaluator == wetfb::EvalMethod::quadrature_exact ? WETFB_EVAL_QUAD_EXACT
                   : r.evaluator == wetfb::EvalMethod::quadrature_linearized
                       ? WETFB_EVAL_QUAD_LINEARIZED
                       : WETFB_EVAL_CLOSED_FORM;
  out->best_eps_found = r.best_eps_found;
}

}  // namespace

struct wetfb_params {
  wetfb::SystemParams cpp;
};

extern "C" {

const char* wetfb_version(void) { return "wetfb 1.0.0"; }

const char* wetfb_last_error(void) { return tl_error_msg; }

wetfb_status wetfb_params_create(const wetfb_params_spec* spec, wetfb_params** out) {
  if (!spec || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  *out = nullptr;
  return guarded([&] {
    wetfb::SystemParams p{spec->m,     spec->eta,   spec->p_d_w,      spec->d_m,
                          spec->alpha, spec->kappa, spec->sigma2_d_w, spec->t_c_s};
    p.validate();
    *out = new wetfb_params{p};
  });
}

void wetfb_params_destroy(wetfb_params* params) { delete params; }

wetfb_status wetfb_mu_factor(const wetfb_params* params, long long v, long long n, double* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] { *out = wetfb::mu_factor(params->cpp, v, n); });
}

wetfb_status wetfb_product_pdf(const wetfb_params* params, double z, double* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] { *out = wetfb::product_pdf(z, params->cpp.m); });
}

wetfb_status wetfb_awgn_normal_terms(double gamma, double* capacity, double* dispersion) {
  if (!capacity || !dispersion) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::CapacityDispersion cd = wetfb::awgn_normal_terms(gamma);
    *capacity = cd.capacity;
    *dispersion = cd.dispersion;
  });
}

wetfb_status wetfb_energy_budget(const wetfb_params* params, long long v, long long n,
                                 double h2, double* harvested_j, double* tx_power_w) {
  if (!params || !harvested_j || !tx_power_w) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::EnergyBudget eb = wetfb::energy_budget(params->cpp, v, n, h2);
    *harvested_j = eb.harvested;
    *tx_power_w = eb.tx_power;
  });
}

wetfb_status wetfb_linearization_info(const wetfb_params* params, long long v, long long n,
                                      long long k, wetfb_linearization* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::BlockAllocation alloc{v, n, k};
    const wetfb::LinearizedQParams qp = wetfb::linearization_params(params->cpp, alloc);
    const wetfb::AllocationMetrics am = wetfb::allocation_metrics(alloc);
    out->mu = qp.mu;
    out->theta = qp.theta;
    out->beta = qp.beta;
    out->varrho = qp.varrho;
    out->vartheta = qp.vartheta;
    out->zeta2 = qp.zeta2;
    out->xi2 = qp.xi2;
    out->omega1 = qp.omega1;
    out->omega2 = qp.omega2;
    out->omega3 = qp.omega3;
    out->clamped = qp.clamped ? 1 : 0;
    out->small_n_warning = alloc.small_n_warning() ? 1 : 0;
    out->rate = am.rate;
    out->delay = am.delay;
    out->delay_seconds = static_cast<double>(am.delay) * params->cpp.t_c;
    out->time_share = am.time_share;
  });
}

wetfb_status wetfb_eps_monte_carlo(const wetfb_params* params, long long v, long long n,
                                   long long k, long long samples, uint64_t seed, int shards,
                                   int threads, wetfb_estimate* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::ErrorProbEstimate e = wetfb::eps_monte_carlo_sharded(
        params->cpp, {v, n, k}, samples, wetfb::RngStream(seed), shards, threads);
    fill_estimate(e, out);
  });
}

wetfb_status wetfb_eps_quadrature(const wetfb_params* params, long long v, long long n,
                                  long long k, int exact_q, double rel_tol,
                                  wetfb_estimate* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::ErrorProbEstimate e = wetfb::eps_quadrature(
        params->cpp, {v, n, k},
        exact_q ? wetfb::IntegrandKind::exact_q : wetfb::IntegrandKind::linearized, rel_tol);
    fill_estimate(e, out);
  });
}

wetfb_status wetfb_eps_closed_form(const wetfb_params* params, long long v, long long n,
                                   long long k, wetfb_estimate* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    fill_estimate(wetfb::eps_closed_form(params->cpp, {v, n, k}), out);
  });
}

wetfb_status wetfb_eps_outage_asymptotic(const wetfb_params* params, long long v, long long n,
                                         long long k, wetfb_estimate* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    fill_estimate(wetfb::eps_outage_asymptotic(params->cpp, {v, n, k}), out);
  });
}

wetfb_status wetfb_eps_fixed_power(const wetfb_params* params, long long v, long long n,
                                   long long k, double p_hat_w, wetfb_estimate* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    fill_estimate(wetfb::eps_fixed_power(params->cpp, {v, n, k}, p_hat_w), out);
  });
}

wetfb_status wetfb_min_wet_blocklength(const wetfb_params* params, long long k, long long n,
                                       double eps0, int evaluator, long long v_max,
                                       wetfb_opt_result* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::LoopEvaluator ev = loop_evaluator(evaluator);
    const wetfb::WetSearchResult w =
        wetfb::min_wet_blocklength(params->cpp, k, n, eps0, ev, v_max);
    wetfb::OptimizationResult r;
    r.eps_target = eps0;
    r.feasible = w.feasible;
    r.best_eps_found = w.feasible ? w.eps_at_v : w.best_eps;
    r.eps_achieved = w.feasible ? w.eps_at_v : w.best_eps;
    r.eps_certified = std::nan("");
    r.evaluator = ev == wetfb::LoopEvaluator::quadrature_exact
                      ? wetfb::EvalMethod::quadrature_exact
                  : ev == wetfb::LoopEvaluator::quadrature_linearized
                      ? wetfb::EvalMethod::quadrature_linearized
                      : wetfb::EvalMethod::closed_form;
    if (w.feasible) {
      r.v_star = w.v_star;
      r.n_star = n;
      r.delta_star = n + w.v_star;
      r.delta_seconds = static_cast<double>(r.delta_star) * params->cpp.t_c;
      r.nu = static_cast<double>(w.v_star) / static_cast<double>(r.delta_star);
    }
    fill_opt(r, out);
  });
}

wetfb_status wetfb_min_delay(const wetfb_params* params, long long k, double eps0,
                             long long n_min, long long n_max, long long n_step, int evaluator,
                             long long v_max, wetfb_opt_result* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::OptimizationResult r = wetfb::min_delay(
        params->cpp, k, eps0, n_min, n_max, n_step, loop_evaluator(evaluator), v_max);
    fill_opt(r, out);
  });
}

wetfb_status wetfb_min_error_given_delay(const wetfb_params* params, long long k,
                                         long long delta, long long n_floor, int evaluator,
                                         wetfb_opt_result* out) {
  if (!params || !out) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::LoopEvaluator ev = loop_evaluator(evaluator);
    const wetfb::FixedDelayResult f =
        wetfb::min_error_given_delay(params->cpp, k, delta, n_floor, ev);
    wetfb::OptimizationResult r;
    r.eps_target = std::nan("");
    r.v_star = f.v_star;
    r.n_star = f.n_star;
    r.delta_star = delta;
    r.delta_seconds = static_cast<double>(delta) * params->cpp.t_c;
    r.nu = f.nu;
    r.eps_achieved = f.eps_star;
    r.eps_certified = f.eps_certified;
    r.feasible = true;
    r.best_eps_found = f.eps_star;
    r.evaluator = ev == wetfb::LoopEvaluator::quadrature_exact
                      ? wetfb::EvalMethod::quadrature_exact
                  : ev == wetfb::LoopEvaluator::quadrature_linearized
                      ? wetfb::EvalMethod::quadrature_linearized
                      : wetfb::EvalMethod::closed_form;
    fill_opt(r, out);
  });
}

wetfb_status wetfb_best_fixed_power(const wetfb_params* params, long long k, long long delta,
                                    long long n_floor, double p_min_w, double p_max_w,
                                    double* p_hat_star_w, wetfb_opt_result* out) {
  if (!params || !out || !p_hat_star_w) {
    set_error("null pointer argument");
    return WETFB_ERR_NULL_PTR;
  }
  return guarded([&] {
    const wetfb::FixedPowerResult f =
        wetfb::best_fixed_power(params->cpp, k, delta, n_floor, p_min_w, p_max_w);
    *p_hat_star_w = f.p_hat_star;
    wetfb::OptimizationResult r;
    r.eps_target = std::nan("");
    r.v_star = delta - f.n_star;
    r.n_star = f.n_star;
    r.delta_star = delta;
    r.delta_seconds = static_cast<double>(delta) * params->cpp.t_c;
    r.nu = static_cast<double>(r.v_star) / static_cast<double>(delta);
    r.eps_achieved = f.eps_star;
    r.eps_certified = std::nan("");
    r.feasible = true;
    r.best_eps_found = f.eps_star;
    fill_opt(r, out);
    out->evaluator = -1; /* no adaptive-allocation loop evaluator involved */
  });
}

}  // extern "C"
