#pragma once

#include "model.hpp"
#include "random.hpp"

namespace wetfb {

// Constants of the piecewise-linear tail approximation and the segment
// weights of the resulting three-part integral.
struct LinearizedQParams {
  double mu;        // SNR factor, gamma = mu z
  double theta;     // 2^{k/n} - 1
  double beta;      // sqrt(n/2pi) (2^{2k/n}-1)^{-1/2}
  double varrho;    // theta - sqrt(pi/2)/beta
  double vartheta;  // theta + sqrt(pi/2)/beta
  double zeta2;     // max(varrho, 0)/mu
  double xi2;       // vartheta/mu
  double omega1;    // 2/Gamma(m)^2
  double omega2;    // beta mu omega1 / sqrt(2pi)
  double omega3;    // (1/2 + beta theta / sqrt(2pi)) omega1
  bool clamped;     // varrho < 0, first segment empty
};

LinearizedQParams linearization_params(const SystemParams& params, const BlockAllocation& alloc);

// Piecewise-linear surrogate for Q(p(mu z)) as a function of z.
double omega(double z, const LinearizedQParams& qp);

enum class IntegrandKind { exact_q, linearized };

// Sample mean of Q(p(mu h~ g~)) over `samples` independent draws.
ErrorProbEstimate eps_monte_carlo(const SystemParams& params, const BlockAllocation& alloc,
                                  long long samples, RngStream stream);

// Same estimator over `shards` deterministic substreams, evaluated on up to
// `threads` workers and merged in shard order: the result depends on
// (stream, shards) only, never on the thread count.
ErrorProbEstimate eps_monte_carlo_sharded(const SystemParams& params,
                                          const BlockAllocation& alloc, long long samples,
                                          RngStream stream, int shards, int threads);

// Adaptive quadrature of the exact or linearized integrand against the
// product-gamma density, with breakpoints where the integrand changes
// character and the substitution z = q^2/4 regularizing the origin.
ErrorProbEstimate eps_quadrature(const SystemParams& params, const BlockAllocation& alloc,
                                 IntegrandKind kind, double rel_tol = 1e-9);

// Closed-form evaluation of the linearized integral (four grouped terms of
// scaled Bessel x hypergeometric products). Falls back to
// eps_quadrature(linearized) when the cancellation monitor trips.
ErrorProbEstimate eps_closed_form(const SystemParams& params, const BlockAllocation& alloc);

// Infinite-blocklength outage baseline Pr[C(mu z) < r].
ErrorProbEstimate eps_outage_asymptotic(const SystemParams& params, const BlockAllocation& alloc);

// Fixed-transmit-power baseline: energy outage (harvested energy cannot
// sustain p_hat for n channel uses) plus decode error at SNR p_hat g^2 /
// (kappa d^alpha sigma2), as independent events.
ErrorProbEstimate eps_fixed_power(const SystemParams& params, const BlockAllocation& alloc,
                                  double p_hat);

}  // namespace wetfb
