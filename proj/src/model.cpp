#include "model.hpp"

#include <cmath>
#include <stdexcept>

#include "specfun.hpp"

namespace wetfb {

namespace {
const double kLog2E = 1.0 / M_LN2;  // log2(e)
}

void SystemParams::validate() const {
  if (!(m >= 0.5)) throw std::domain_error("SystemParams: m must be >= 0.5");
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("SystemParams: eta must be in (0,1)");
  if (!(p_d > 0.0)) throw std::domain_error("SystemParams: p_d must be > 0");
  if (!(d > 0.0)) throw std::domain_error("SystemParams: d must be > 0");
  if (!(alpha > 0.0)) throw std::domain_error("SystemParams: alpha must be > 0");
  if (!(kappa > 0.0)) throw std::domain_error("SystemParams: kappa must be > 0");
  if (!(sigma2_d > 0.0)) throw std::domain_error("SystemParams: sigma2_d must be > 0");
  if (!(t_c > 0.0)) throw std::domain_error("SystemParams: t_c must be > 0");
}

void BlockAllocation::validate() const {
  if (v < 1) throw std::domain_error("BlockAllocation: v must be >= 1");
  if (n < 1) throw std::domain_error("BlockAllocation: n must be >= 1");
  if (k < 1) throw std::domain_error("BlockAllocation: k must be >= 1");
}

double mu_factor(const SystemParams& params, long long v, long long n) {
  params.validate();
  if (v < 1 || n < 1) throw std::domain_error("mu_factor: v, n must be >= 1");
  const double path = params.kappa * std::pow(params.d, params.alpha);
  return params.eta * static_cast<double>(v) * params.p_d /
         (params.m * params.m * static_cast<double>(n) * path * path * params.sigma2_d);
}

double product_pdf(double z, double m) {
  if (!(z > 0.0)) throw std::domain_error("product_pdf: z must be > 0");
  if (!(m >= 0.5)) throw std::domain_error("product_pdf: m must be >= 0.5");
  const double g = std::tgamma(m);
  return 2.0 / (g * g) * std::pow(z, m - 1.0) * bessel_k(0, 2.0 * std::sqrt(z));
}

CapacityDispersion awgn_normal_terms(double gamma) {
  if (!(gamma >= 0.0)) throw std::domain_error("awgn_normal_terms: gamma must be >= 0");
  const double c = std::log1p(gamma) * kLog2E;
  // 1 - (1+g)^{-2} written as g(2+g)/(1+g)^2 to avoid cancellation near 0.
  const double op = 1.0 + gamma;
  const double v = gamma * (2.0 + gamma) / (op * op) * kLog2E * kLog2E;
  return {c, v};
}

AllocationMetrics allocation_metrics(const BlockAllocation& alloc) {
  alloc.validate();
  const long long delay = alloc.n + alloc.v;
  return {static_cast<double>(alloc.k) / static_cast<double>(alloc.n), delay,
          static_cast<double>(alloc.v) / static_cast<double>(delay)};
}

EnergyBudget energy_budget(const SystemParams& params, long long v, long long n, double h2) {
  params.validate();
  if (v < 1 || n < 1) throw std::domain_error("energy_budget: v, n must be >= 1");
  if (!(h2 >= 0.0)) throw std::domain_error("energy_budget: h2 must be >= 0");
  const double path = params.kappa * std::pow(params.d, params.alpha);
  const double harvested = params.eta * params.p_d * h2 * static_cast<double>(v) * params.t_c / path;
  const double tx_power = harvested / (static_cast<double>(n) * params.t_c);
  return {harvested, tx_power};
}

double normal_approx_error(double gamma, double r, double n) {
  if (gamma <= 0.0) return r > 0.0 ? 1.0 : 0.0;
  const CapacityDispersion cd = awgn_normal_terms(gamma);
  const double arg = (cd.capacity - r) * std::sqrt(n / cd.dispersion);
  return gauss_q(arg);
}

}  // namespace wetfb
