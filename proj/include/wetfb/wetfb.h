/*
 * wetfb: finite-blocklength error probability and blocklength optimization
 * for a wireless-energy-transfer downlink / information-uplink system under
 * Nakagami-m quasi-static fading.
 *
 * All functions return a wetfb_status; on failure, wetfb_last_error() gives
 * a thread-local description of the most recent error in this thread.
 */
#ifndef WETFB_H
#define WETFB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wetfb_status {
  WETFB_OK = 0,
  WETFB_ERR_NULL_PTR = 1,
  WETFB_ERR_INVALID = 2,        /* domain/invariant violation */
  WETFB_ERR_NO_CONVERGENCE = 3, /* series or iteration failed to converge */
  WETFB_ERR_INTERNAL = 4,
} wetfb_status;

/* Error-probability method tags (wetfb_estimate.method). */
enum {
  WETFB_METHOD_MONTE_CARLO = 0,
  WETFB_METHOD_QUAD_EXACT = 1,
  WETFB_METHOD_QUAD_LINEARIZED = 2,
  WETFB_METHOD_CLOSED_FORM = 3,
  WETFB_METHOD_ASYMPTOTIC = 4,
  WETFB_METHOD_FIXED_POWER = 5,
};

/* Optimizer loop evaluator tags. */
enum {
  WETFB_EVAL_CLOSED_FORM = 0,
  WETFB_EVAL_QUAD_EXACT = 1,
  WETFB_EVAL_QUAD_LINEARIZED = 2,
};

const char* wetfb_version(void);

/* Thread-local message for the last error raised in this thread. */
const char* wetfb_last_error(void);

/* Opaque validated parameter set. */
typedef struct wetfb_params wetfb_params;

/* Plain input spec; powers in watts, distance in meters, time in seconds. */
typedef struct wetfb_params_spec {
  double m;         /* Nakagami shape, >= 0.5 */
  double eta;       /* energy conversion efficiency, in (0,1) */
  double p_d_w;     /* interrogator transmit power [W] */
  double d_m;       /* distance [m] */
  double alpha;     /* path loss exponent */
  double kappa;     /* aggregate attenuation factor, linear */
  double sigma2_d_w;/* noise power [W] */
  double t_c_s;     /* channel use duration [s] */
} wetfb_params_spec;

wetfb_status wetfb_params_create(const wetfb_params_spec* spec, wetfb_params** out);
void wetfb_params_destroy(wetfb_params* params);

/* Error-probability estimate with provenance. */
typedef struct wetfb_estimate {
  double value;       /* probability in [0,1] */
  double uncertainty; /* MC standard error or quadrature error bound */
  int method;         /* WETFB_METHOD_* */
  int fallback_used;  /* closed form fell back to quadrature */
} wetfb_estimate;

/* Linearization constants plus allocation metrics for one (v, n, k). */
typedef struct wetfb_linearization {
  double mu, theta, beta, varrho, vartheta, zeta2, xi2;
  double omega1, omega2, omega3;
  int clamped;         /* varrho < 0: first segment empty */
  int small_n_warning; /* n < 100: approximation regime */
  double rate;         /* k/n */
  long long delay;     /* n + v, channel uses */
  double delay_seconds;
  double time_share;   /* v/(n+v) */
} wetfb_linearization;

wetfb_status wetfb_mu_factor(const wetfb_params* params, long long v, long long n, double* out);
wetfb_status wetfb_product_pdf(const wetfb_params* params, double z, double* out);
wetfb_status wetfb_awgn_normal_terms(double gamma, double* capacity, double* dispersion);
wetfb_status wetfb_energy_budget(const wetfb_params* params, long long v, long long n,
                                 double h2, double* harvested_j, double* tx_power_w);
wetfb_status wetfb_linearization_info(const wetfb_params* params, long long v, long long n,
                                      long long k, wetfb_linearization* out);

wetfb_status wetfb_eps_monte_carlo(const wetfb_params* params, long long v, long long n,
                                   long long k, long long samples, uint64_t seed, int shards,
                                   int threads, wetfb_estimate* out);
/* exact_q nonzero: integrate the exact Q integrand; zero: linearized. */
wetfb_status wetfb_eps_quadrature(const wetfb_params* params, long long v, long long n,
                                  long long k, int exact_q, double rel_tol,
                                  wetfb_estimate* out);
wetfb_status wetfb_eps_closed_form(const wetfb_params* params, long long v, long long n,
                                   long long k, wetfb_estimate* out);
wetfb_status wetfb_eps_outage_asymptotic(const wetfb_params* params, long long v, long long n,
                                         long long k, wetfb_estimate* out);
wetfb_status wetfb_eps_fixed_power(const wetfb_params* params, long long v, long long n,
                                   long long k, double p_hat_w, wetfb_estimate* out);

/* Optimization result; when infeasible, best_eps_found reports the smallest
 * error probability encountered and the starred fields are zero. */
typedef struct wetfb_opt_result {
  double eps_target;
  long long v_star, n_star, delta_star;
  double delta_seconds;
  double nu;
  double eps_achieved;  /* loop evaluator's value at the optimum */
  double eps_certified; /* exact-Q quadrature at the optimum (NaN if skipped) */
  int feasible;
  int evaluator; /* WETFB_EVAL_* used in the loops; -1 for the fixed-power baseline */
  double best_eps_found;
} wetfb_opt_result;

wetfb_status wetfb_min_wet_blocklength(const wetfb_params* params, long long k, long long n,
                                       double eps0, int evaluator, long long v_max,
                                       wetfb_opt_result* out);
/* n_step = 0: geometric coarse grid + integer refinement; > 0: arithmetic grid. */
wetfb_status wetfb_min_delay(const wetfb_params* params, long long k, double eps0,
                             long long n_min, long long n_max, long long n_step, int evaluator,
                             long long v_max, wetfb_opt_result* out);
/* Fills eps_target with NaN; eps_achieved carries the minimized error. */
wetfb_status wetfb_min_error_given_delay(const wetfb_params* params, long long k,
                                         long long delta, long long n_floor, int evaluator,
                                         wetfb_opt_result* out);
wetfb_status wetfb_best_fixed_power(const wetfb_params* params, long long k, long long delta,
                                    long long n_floor, double p_min_w, double p_max_w,
                                    double* p_hat_star_w, wetfb_opt_result* out);

#ifdef __cplusplus
}
#endif

#endif /* WETFB_H */
