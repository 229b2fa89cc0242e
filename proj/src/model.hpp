#pragma once

#include <cstdint>

namespace wetfb {

// Physical constants of the link. Powers in watts, distance in meters,
// time in seconds; dBm conversion is a front-end concern.
struct SystemParams {
  double m;         // Nakagami shape, >= 0.5
  double eta;       // energy conversion efficiency, in (0,1)
  double p_d;       // interrogator transmit power [W]
  double d;         // S-D distance [m]
  double alpha;     // path loss exponent
  double kappa;     // aggregate attenuation factor (linear)
  double sigma2_d;  // noise power at D [W]
  double t_c;       // channel use duration [s]

  void validate() const;  // throws std::domain_error on violation
};

// One WET/WIT configuration: v energy channel uses, n information channel
// uses, k message bits.
struct BlockAllocation {
  long long v;
  long long n;
  long long k;

  void validate() const;
  // Normal-approximation accuracy degrades below n = 100; advisory only.
  bool small_n_warning() const { return n < 100; }
};

enum class EvalMethod {
  monte_carlo,
  quadrature_exact,
  quadrature_linearized,
  closed_form,
  asymptotic,
  fixed_power,
};

struct ErrorProbEstimate {
  double value = 0.0;          // in [0,1]
  EvalMethod method = EvalMethod::closed_form;
  double uncertainty = 0.0;    // MC standard error or quadrature error bound
  bool fallback_used = false;
};

// SNR factor mu with gamma = mu * z, z = h~ * g~ (product of two
// standard-gamma variates of shape m).
double mu_factor(const SystemParams& params, long long v, long long n);

// Density of z = h~ g~: (2 / Gamma(m)^2) z^{m-1} K0(2 sqrt(z)).
double product_pdf(double z, double m);

struct CapacityDispersion {
  double capacity;    // bits / channel use
  double dispersion;  // bits^2 / channel use
};

// Shannon capacity and channel dispersion of the AWGN normal approximation.
CapacityDispersion awgn_normal_terms(double gamma);

struct AllocationMetrics {
  double rate;        // k / n
  long long delay;    // n + v, channel uses
  double time_share;  // v / (n + v)
};

AllocationMetrics allocation_metrics(const BlockAllocation& alloc);

struct EnergyBudget {
  double harvested;  // joules over the WET phase
  double tx_power;   // watts available for the WIT phase
};

EnergyBudget energy_budget(const SystemParams& params, long long v, long long n, double h2);

// Q((C(gamma) - r) / sqrt(V(gamma)/n)), with the gamma = 0 limit resolved
// to 1 for r > 0 (zero dispersion, negative numerator).
double normal_approx_error(double gamma, double r, double n);

}  // namespace wetfb
