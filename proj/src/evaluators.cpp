#include "evaluators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "quadrature.hpp"
#include "specfun.hpp"

namespace wetfb {

namespace {

const double kLog2E = 1.0 / M_LN2;
const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

// Beyond this q = 2 sqrt(z), K0(q) underflows and the integrand is an exact
// double-precision zero.
constexpr double kQCut = 752.0;

// Above this xi^2 the direct closed form would overflow the 1F2 series;
// the quadrature fallback covers the regime.
constexpr double kClosedFormZMax = 1.0e5;

// Cancellation condition number (sum |terms| / |sum|) above which fewer
// than ~9 reliable digits remain and the 1e-6 identity target is at risk.
constexpr double kCondFallback = 1.0e7;

double clamp01(double x) {
  return std::min(1.0, std::max(0.0, x));
}

struct WelfordStat {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const WelfordStat& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const double nn = static_cast<double>(n) + static_cast<double>(o.n);
    mean += d * static_cast<double>(o.n) / nn;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nn;
    n += o.n;
  }

  double stderr_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / (static_cast<double>(n - 1) * static_cast<double>(n)));
  }
};

WelfordStat mc_shard(const SystemParams& params, double mu, double r, double n_wit,
                     long long count, RngStream rng) {
  WelfordStat stat;
  for (long long i = 0; i < count; ++i) {
    const double h = sample_std_gamma(params.m, rng);
    const double g = sample_std_gamma(params.m, rng);
    stat.add(normal_approx_error(mu * h * g, r, n_wit));
  }
  return stat;
}

// Breakpoint list { 0, interior..., hi } with interior candidates filtered
// into (0, hi) and deduplicated.
std::vector<double> make_breaks(std::vector<double> cand, double hi) {
  std::vector<double> breaks{0.0};
  std::sort(cand.begin(), cand.end());
  for (double c : cand) {
    if (!std::isfinite(c)) continue;
    if (c <= hi * 1e-14 || c >= hi * (1.0 - 1e-14)) continue;
    if (c - breaks.back() <= hi * 1e-13) continue;
    breaks.push_back(c);
  }
  breaks.push_back(hi);
  return breaks;
}

ErrorProbEstimate quadrature_impl(const SystemParams& params, const BlockAllocation& alloc,
                                  IntegrandKind kind, double rel_tol, bool fallback_flag) {
  if (!(rel_tol > 0.0)) throw std::domain_error("eps_quadrature: rel_tol must be > 0");
  const LinearizedQParams lin = linearization_params(params, alloc);
  const double m = params.m;
  const double gm = std::tgamma(m);
  const double w1 = 2.0 / (gm * gm);
  const double r = static_cast<double>(alloc.k) / static_cast<double>(alloc.n);
  const double n_wit = static_cast<double>(alloc.n);
  const double mu = lin.mu;

  // In q = 2 sqrt(z), the density part becomes w1 (q/2)^{2m-1} K0(q),
  // removing the z = 0 singularity for every m >= 0.5.
  double q_hi;
  std::vector<double> cand;
  std::function<double(double)> f;
  if (kind == IntegrandKind::exact_q) {
    // Beyond r + 40 log2(e)/sqrt(n) bits the Q argument exceeds 40 and the
    // integrand is zero to double precision; K0 underflow caps the range too.
    const double rcap = r + 40.0 * kLog2E / std::sqrt(n_wit);
    double z_hi = HUGE_VAL;
    if (rcap * M_LN2 < 700.0) z_hi = std::expm1(rcap * M_LN2) / mu;
    q_hi = std::min(2.0 * std::sqrt(z_hi), kQCut);
    if (lin.zeta2 > 0.0) cand.push_back(2.0 * std::sqrt(lin.zeta2));
    cand.push_back(2.0 * std::sqrt(lin.theta / mu));
    cand.push_back(2.0 * std::sqrt(lin.xi2));
    f = [=](double q) {
      return w1 * std::pow(0.5 * q, 2.0 * m - 1.0) * bessel_k(0, q) *
             normal_approx_error(mu * 0.25 * q * q, r, n_wit);
    };
  } else {
    q_hi = std::min(2.0 * std::sqrt(lin.xi2), kQCut);
    if (lin.zeta2 > 0.0) cand.push_back(2.0 * std::sqrt(lin.zeta2));
    cand.push_back(2.0 * std::sqrt(lin.theta / mu));
    f = [=](double q) {
      return w1 * std::pow(0.5 * q, 2.0 * m - 1.0) * bessel_k(0, q) * omega(0.25 * q * q, lin);
    };
  }

  QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 0.0;
  opt.max_intervals = 4000;
  const QuadResult qr = integrate_segmented(f, make_breaks(std::move(cand), q_hi), opt);

  ErrorProbEstimate est;
  est.value = clamp01(qr.value);
  est.method = (kind == IntegrandKind::exact_q) ? EvalMethod::quadrature_exact
                                                : EvalMethod::quadrature_linearized;
  est.uncertainty = qr.abs_error;
  est.fallback_used = fallback_flag;
  return est;
}

}  // namespace

LinearizedQParams linearization_params(const SystemParams& params, const BlockAllocation& alloc) {
  params.validate();
  alloc.validate();
  const double n = static_cast<double>(alloc.n);
  const double r = static_cast<double>(alloc.k) / n;
  LinearizedQParams qp;
  qp.mu = mu_factor(params, alloc.v, alloc.n);
  qp.theta = std::expm1(r * M_LN2);
  const double t2 = std::expm1(2.0 * r * M_LN2);  // 2^{2r} - 1
  qp.beta = std::sqrt(n / (2.0 * M_PI)) / std::sqrt(t2);
  const double spread = std::sqrt(0.5 * M_PI) / qp.beta;
  qp.varrho = qp.theta - spread;
  qp.vartheta = qp.theta + spread;
  qp.clamped = qp.varrho < 0.0;
  qp.zeta2 = qp.clamped ? 0.0 : qp.varrho / qp.mu;
  qp.xi2 = qp.vartheta / qp.mu;
  const double gm = std::tgamma(params.m);
  qp.omega1 = 2.0 / (gm * gm);
  qp.omega2 = qp.beta * qp.mu / kSqrt2Pi * qp.omega1;
  qp.omega3 = (0.5 + qp.beta * qp.theta / kSqrt2Pi) * qp.omega1;
  return qp;
}

double omega(double z, const LinearizedQParams& qp) {
  if (!(z > 0.0)) throw std::domain_error("omega: z must be > 0");
  if (z <= qp.zeta2) return 1.0;
  if (z >= qp.xi2) return 0.0;
  return clamp01(0.5 - qp.beta / kSqrt2Pi * (qp.mu * z - qp.theta));
}

ErrorProbEstimate eps_monte_carlo(const SystemParams& params, const BlockAllocation& alloc,
                                  long long samples, RngStream stream) {
  return eps_monte_carlo_sharded(params, alloc, samples, stream, 1, 1);
}

ErrorProbEstimate eps_monte_carlo_sharded(const SystemParams& params,
                                          const BlockAllocation& alloc, long long samples,
                                          RngStream stream, int shards, int threads) {
  params.validate();
  alloc.validate();
  if (samples < 1) throw std::domain_error("eps_monte_carlo: samples must be >= 1");
  if (shards < 1) throw std::domain_error("eps_monte_carlo: shards must be >= 1");
  if (shards > samples) shards = static_cast<int>(samples);
  threads = std::max(1, std::min(threads, shards));

  const double mu = mu_factor(params, alloc.v, alloc.n);
  const double r = static_cast<double>(alloc.k) / static_cast<double>(alloc.n);
  const double n_wit = static_cast<double>(alloc.n);
  const long long base = samples / shards;
  const long long extra = samples % shards;

  std::vector<WelfordStat> stats(shards);
  if (threads == 1) {
    for (int s = 0; s < shards; ++s) {
      const long long count = base + (s < extra ? 1 : 0);
      stats[s] = mc_shard(params, mu, r, n_wit, count, stream.split(s));
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int s = next.fetch_add(1);
        if (s >= shards) return;
        const long long count = base + (s < extra ? 1 : 0);
        stats[s] = mc_shard(params, mu, r, n_wit, count, stream.split(s));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  WelfordStat total;  // merged in shard order: thread-count independent
  for (const auto& s : stats) total.merge(s);

  ErrorProbEstimate est;
  est.value = clamp01(total.mean);
  est.method = EvalMethod::monte_carlo;
  est.uncertainty = total.stderr_mean();
  est.fallback_used = false;
  return est;
}

ErrorProbEstimate eps_quadrature(const SystemParams& params, const BlockAllocation& alloc,
                                 IntegrandKind kind, double rel_tol) {
  return quadrature_impl(params, alloc, kind, rel_tol, false);
}

ErrorProbEstimate eps_closed_form(const SystemParams& params, const BlockAllocation& alloc) {
  const LinearizedQParams qp = linearization_params(params, alloc);
  if (!(qp.xi2 < kClosedFormZMax)) {
    return quadrature_impl(params, alloc, IntegrandKind::linearized, 1e-9, true);
  }
  const double m = params.m;
  const double w13 = qp.omega1 * (0.5 - qp.beta * qp.theta / kSqrt2Pi);  // omega1 - omega3

  double terms[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  if (qp.zeta2 > 0.0) {
    const double zeta = std::sqrt(qp.zeta2);
    const double xz = 2.0 * zeta;
    const double k0z = bessel_k(0, xz, true);
    const double k1z = bessel_k(1, xz, true);
    const double zs = std::exp(m * std::log(qp.zeta2) - xz);  // zeta^{2m} e^{-2 zeta}
    terms[0] = w13 / m * zs * k0z * hyp1f2(m, m + 1.0, qp.zeta2);
    terms[1] = w13 / m * zs * (zeta / m) * k1z * hyp1f2(m + 1.0, m + 1.0, qp.zeta2);
    const double c2 = qp.omega2 / (m + 1.0) * zs * qp.zeta2;
    terms[2] = c2 * k0z * hyp1f2(m + 1.0, m + 2.0, qp.zeta2);
    terms[3] = c2 * (zeta / (m + 1.0)) * k1z * hyp1f2(m + 2.0, m + 2.0, qp.zeta2);
  }
  {
    const double xi = std::sqrt(qp.xi2);
    const double xx = 2.0 * xi;
    const double k0x = bessel_k(0, xx, true);
    const double k1x = bessel_k(1, xx, true);
    const double xs = std::exp(m * std::log(qp.xi2) - xx);  // xi^{2m} e^{-2 xi}
    terms[4] = qp.omega3 / m * xs * k0x * hyp1f2(m, m + 1.0, qp.xi2);
    terms[5] = -qp.omega2 * qp.xi2 / (m + 1.0) * xs * k0x * hyp1f2(m + 1.0, m + 2.0, qp.xi2);
    terms[6] = qp.omega3 / (m * m) * xs * xi * k1x * hyp1f2(m + 1.0, m + 1.0, qp.xi2);
    terms[7] = -qp.omega2 * qp.xi2 / ((m + 1.0) * (m + 1.0)) * xs * xi * k1x *
               hyp1f2(m + 2.0, m + 2.0, qp.xi2);
  }

  double sum = 0.0, comp = 0.0, absum = 0.0;
  for (double t : terms) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    absum += std::fabs(t);
  }

  const double cond = absum / std::fabs(sum);
  if (!std::isfinite(sum) || sum <= 0.0 || cond > kCondFallback) {
    return quadrature_impl(params, alloc, IntegrandKind::linearized, 1e-9, true);
  }

  ErrorProbEstimate est;
  est.value = clamp01(sum);
  est.method = EvalMethod::closed_form;
  est.uncertainty = cond * 2.2e-16 * sum;  // rounding bound from the monitor
  est.fallback_used = false;
  return est;
}

ErrorProbEstimate eps_outage_asymptotic(const SystemParams& params, const BlockAllocation& alloc) {
  params.validate();
  alloc.validate();
  const double r = static_cast<double>(alloc.k) / static_cast<double>(alloc.n);
  const double theta = std::expm1(r * M_LN2);
  const double mu = mu_factor(params, alloc.v, alloc.n);
  const double gm = std::tgamma(params.m);
  const double w1 = 2.0 / (gm * gm);
  const double f = zpk0_antiderivative(params.m - 1.0, theta / mu);

  ErrorProbEstimate est;
  est.value = clamp01(w1 * f);
  est.method = EvalMethod::asymptotic;
  est.uncertainty = 1e-13 * est.value;
  est.fallback_used = false;
  return est;
}

ErrorProbEstimate eps_fixed_power(const SystemParams& params, const BlockAllocation& alloc,
                                  double p_hat) {
  params.validate();
  alloc.validate();
  if (!(p_hat > 0.0)) throw std::domain_error("eps_fixed_power: p_hat must be > 0");
  const double m = params.m;
  const double path = params.kappa * std::pow(params.d, params.alpha);
  const double n_wit = static_cast<double>(alloc.n);
  const double r = static_cast<double>(alloc.k) / n_wit;

  // Energy outage: harvested E < p_hat n T_c, a threshold on h^2 ~ Gamma(m, 1/m).
  const double h2_thr = p_hat * n_wit * path /
                        (params.eta * static_cast<double>(alloc.v) * params.p_d);
  const double p_out = gamma_p(m, m * h2_thr);

  // Decode error at fixed SNR s t, t = g^2 ~ Gamma(m, 1/m); t = u^2 keeps the
  // density factor bounded at the origin for every m >= 0.5.
  const double s = p_hat / (path * params.sigma2_d);
  const double theta = std::expm1(r * M_LN2);
  const double t2 = std::expm1(2.0 * r * M_LN2);
  const double beta = std::sqrt(n_wit / (2.0 * M_PI)) / std::sqrt(t2);
  const double spread = std::sqrt(0.5 * M_PI) / beta;

  const double gcap = r + 40.0 * kLog2E / std::sqrt(n_wit);
  double t_qcut = HUGE_VAL;
  if (gcap * M_LN2 < 700.0) t_qcut = std::expm1(gcap * M_LN2) / s;
  const double t_tail = (m + 45.0 + 12.0 * std::sqrt(m)) / m;
  const double u_hi = std::sqrt(std::min(t_qcut, t_tail));

  std::vector<double> cand;
  if (theta - spread > 0.0) cand.push_back(std::sqrt((theta - spread) / s));
  cand.push_back(std::sqrt(theta / s));
  cand.push_back(std::sqrt((theta + spread) / s));
  const double dens = 2.0 * std::exp(m * std::log(m) - std::lgamma(m));
  auto f = [=](double u) {
    return dens * std::pow(u, 2.0 * m - 1.0) * std::exp(-m * u * u) *
           normal_approx_error(s * u * u, r, n_wit);
  };
  QuadOptions opt;
  opt.rel_tol = 1e-9;
  opt.max_intervals = 4000;
  const QuadResult qr = integrate_segmented(f, make_breaks(std::move(cand), u_hi), opt);
  const double eps_dec = clamp01(qr.value);

  ErrorProbEstimate est;
  est.value = clamp01(p_out + (1.0 - p_out) * eps_dec);
  est.method = EvalMethod::fixed_power;
  est.uncertainty = (1.0 - p_out) * qr.abs_error;
  est.fallback_used = false;
  return est;
}

}  // namespace wetfb
