#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "wetfb/wetfb.h"

namespace {

wetfb_params_spec reference_spec() {
  wetfb_params_spec s;
  s.m = 3.0;
  s.eta = 0.5;
  s.p_d_w = 1.0;
  s.d_m = 12.0;
  s.alpha = 3.0;
  s.kappa = 1000.0;
  s.sigma2_d_w = 1e-14;
  s.t_c_s = 3e-6;
  return s;
}

// RAII so failed REQUIREs cannot leak handles.
struct Params {
  wetfb_params* h = nullptr;
  explicit Params(const wetfb_params_spec& spec) { REQUIRE(wetfb_params_create(&spec, &h) == WETFB_OK); }
  ~Params() { wetfb_params_destroy(h); }
  Params(const Params&) = delete;
  Params& operator=(const Params&) = delete;
};

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fmax(std::fabs(want), 1e-300);
}

}  // namespace

TEST_CASE("version and error reporting") {
  REQUIRE(wetfb_version() != nullptr);
  CHECK(std::strstr(wetfb_version(), "wetfb") != nullptr);

  CHECK(wetfb_params_create(nullptr, nullptr) == WETFB_ERR_NULL_PTR);
  CHECK(std::strlen(wetfb_last_error()) > 0);

  wetfb_params_spec bad = reference_spec();
  bad.m = 0.3;  // below the Nakagami floor
  wetfb_params* h = reinterpret_cast<wetfb_params*>(0x1);
  CHECK(wetfb_params_create(&bad, &h) == WETFB_ERR_INVALID);
  CHECK(h == nullptr);  // cleared before validation
  CHECK(std::strlen(wetfb_last_error()) > 0);

  bad = reference_spec();
  bad.eta = 1.0;  // boundary excluded
  CHECK(wetfb_params_create(&bad, &h) == WETFB_ERR_INVALID);

  wetfb_params_destroy(nullptr);  // must be a no-op
}

TEST_CASE("model helpers round-trip through the C boundary") {
  const Params p(reference_spec());

  double mu = 0.0;
  REQUIRE(wetfb_mu_factor(p.h, 3000, 300, &mu) == WETFB_OK);
  CHECK(rel_err(mu, 1.86054 * 10.0) < 1e-5);
  CHECK(wetfb_mu_factor(nullptr, 3000, 300, &mu) == WETFB_ERR_NULL_PTR);
  CHECK(wetfb_mu_factor(p.h, 0, 300, &mu) == WETFB_ERR_INVALID);

  double pdf = 0.0;
  REQUIRE(wetfb_product_pdf(p.h, 1.0, &pdf) == WETFB_OK);
  CHECK(pdf > 0.0);
  CHECK(wetfb_product_pdf(p.h, -1.0, &pdf) == WETFB_ERR_INVALID);

  double cap = 0.0, disp = 0.0;
  REQUIRE(wetfb_awgn_normal_terms(1.0, &cap, &disp) == WETFB_OK);
  CHECK(rel_err(cap, 1.0) < 1e-15);
  CHECK(disp > 0.0);
  CHECK(wetfb_awgn_normal_terms(1.0, nullptr, &disp) == WETFB_ERR_NULL_PTR);

  double harvested = 0.0, tx = 0.0;
  REQUIRE(wetfb_energy_budget(p.h, 3000, 300, 2.5, &harvested, &tx) == WETFB_OK);
  CHECK(rel_err(harvested, tx * 300.0 * 3e-6) < 1e-12);
}

TEST_CASE("linearization info is self-consistent") {
  const Params p(reference_spec());
  wetfb_linearization lin;
  REQUIRE(wetfb_linearization_info(p.h, 3000, 300, 216, &lin) == WETFB_OK);

  CHECK(lin.delay == 3300);
  CHECK(rel_err(lin.rate, 216.0 / 300.0) < 1e-15);
  CHECK(rel_err(lin.time_share, 3000.0 / 3300.0) < 1e-15);
  CHECK(rel_err(lin.delay_seconds, 3300.0 * 3e-6) < 1e-15);
  CHECK(lin.small_n_warning == 0);
  CHECK(lin.clamped == 0);
  CHECK(rel_err(lin.zeta2 * lin.mu, lin.varrho) < 1e-12);
  CHECK(rel_err(lin.xi2 * lin.mu, lin.vartheta) < 1e-12);
  CHECK(rel_err(lin.omega3, 0.5 * lin.omega1 + lin.omega2 * lin.theta / lin.mu) < 1e-12);

  wetfb_linearization small;
  REQUIRE(wetfb_linearization_info(p.h, 3000, 99, 64, &small) == WETFB_OK);
  CHECK(small.small_n_warning == 1);

  CHECK(wetfb_linearization_info(p.h, 0, 300, 216, &lin) == WETFB_ERR_INVALID);
}

TEST_CASE("estimators expose method tags and agree across routes") {
  const Params p(reference_spec());

  wetfb_estimate cf, ql, qx, outage, fp;
  REQUIRE(wetfb_eps_closed_form(p.h, 3000, 300, 216, &cf) == WETFB_OK);
  REQUIRE(wetfb_eps_quadrature(p.h, 3000, 300, 216, 0, 1e-10, &ql) == WETFB_OK);
  REQUIRE(wetfb_eps_quadrature(p.h, 3000, 300, 216, 1, 1e-10, &qx) == WETFB_OK);
  REQUIRE(wetfb_eps_outage_asymptotic(p.h, 3000, 300, 216, &outage) == WETFB_OK);
  REQUIRE(wetfb_eps_fixed_power(p.h, 3000, 300, 216, 1e-7, &fp) == WETFB_OK);

  CHECK(cf.method == WETFB_METHOD_CLOSED_FORM);
  CHECK(cf.fallback_used == 0);
  CHECK(ql.method == WETFB_METHOD_QUAD_LINEARIZED);
  CHECK(qx.method == WETFB_METHOD_QUAD_EXACT);
  CHECK(outage.method == WETFB_METHOD_ASYMPTOTIC);
  CHECK(fp.method == WETFB_METHOD_FIXED_POWER);

  CHECK(rel_err(cf.value, ql.value) < 1e-6);
  CHECK(std::fabs(std::log10(cf.value / qx.value)) < 0.1);
  for (const wetfb_estimate* e : {&cf, &ql, &qx, &outage, &fp}) {
    CHECK(e->value >= 0.0);
    CHECK(e->value <= 1.0);
    CHECK(e->uncertainty >= 0.0);
  }

  CHECK(wetfb_eps_quadrature(p.h, 3000, 300, 216, 0, 0.0, &ql) == WETFB_ERR_INVALID);
  CHECK(wetfb_eps_fixed_power(p.h, 3000, 300, 216, 0.0, &fp) == WETFB_ERR_INVALID);
  CHECK(wetfb_eps_closed_form(p.h, 3000, 300, 216, nullptr) == WETFB_ERR_NULL_PTR);
}

TEST_CASE("Monte Carlo through the C API is thread-count independent") {
  const Params p(reference_spec());
  wetfb_estimate a, b, c;
  REQUIRE(wetfb_eps_monte_carlo(p.h, 100, 300, 216, 100000, 2024, 8, 1, &a) == WETFB_OK);
  REQUIRE(wetfb_eps_monte_carlo(p.h, 100, 300, 216, 100000, 2024, 8, 4, &b) == WETFB_OK);
  REQUIRE(wetfb_eps_monte_carlo(p.h, 100, 300, 216, 100000, 2025, 8, 1, &c) == WETFB_OK);
  CHECK(a.method == WETFB_METHOD_MONTE_CARLO);
  CHECK(a.value == b.value);
  CHECK(a.uncertainty == b.uncertainty);
  CHECK(a.value != c.value);
  CHECK(a.uncertainty > 0.0);

  CHECK(wetfb_eps_monte_carlo(p.h, 100, 300, 216, 0, 1, 8, 1, &a) == WETFB_ERR_INVALID);
}

TEST_CASE("WET blocklength search through the C API") {
  const Params p(reference_spec());
  wetfb_opt_result r;
  REQUIRE(wetfb_min_wet_blocklength(p.h, 216, 300, 1e-3, WETFB_EVAL_CLOSED_FORM, 1000000000LL,
                                    &r) == WETFB_OK);
  REQUIRE(r.feasible == 1);
  CHECK(r.eps_target == 1e-3);
  CHECK(r.v_star >= 1);
  CHECK(r.n_star == 300);
  CHECK(r.delta_star == r.n_star + r.v_star);
  CHECK(rel_err(r.nu, static_cast<double>(r.v_star) / static_cast<double>(r.delta_star)) < 1e-15);
  CHECK(r.eps_achieved <= 1e-3);
  CHECK(std::isnan(r.eps_certified));
  CHECK(r.evaluator == WETFB_EVAL_CLOSED_FORM);

  wetfb_estimate at, below;
  REQUIRE(wetfb_eps_closed_form(p.h, r.v_star, 300, 216, &at) == WETFB_OK);
  CHECK(at.value <= 1e-3);
  if (r.v_star > 1) {
    REQUIRE(wetfb_eps_closed_form(p.h, r.v_star - 1, 300, 216, &below) == WETFB_OK);
    CHECK(below.value > 1e-3);
  }

  // Infeasible: starred fields zeroed, best error reported.
  wetfb_opt_result inf;
  REQUIRE(wetfb_min_wet_blocklength(p.h, 216, 100, 1e-12, WETFB_EVAL_CLOSED_FORM, 100, &inf) ==
          WETFB_OK);
  CHECK(inf.feasible == 0);
  CHECK(inf.v_star == 0);
  CHECK(inf.delta_star == 0);
  CHECK(inf.best_eps_found > 1e-12);
  CHECK(inf.best_eps_found < 1.0);

  CHECK(wetfb_min_wet_blocklength(p.h, 216, 300, 1e-3, 7, 1000, &r) == WETFB_ERR_INVALID);
  CHECK(std::strlen(wetfb_last_error()) > 0);
}

TEST_CASE("delay minimization through the C API") {
  const Params p(reference_spec());
  wetfb_opt_result r;
  REQUIRE(wetfb_min_delay(p.h, 216, 1e-3, 100, 200, 10, WETFB_EVAL_QUAD_LINEARIZED, 5000, &r) ==
          WETFB_OK);
  REQUIRE(r.feasible == 1);
  CHECK(r.delta_star == r.n_star + r.v_star);
  CHECK(r.evaluator == WETFB_EVAL_QUAD_LINEARIZED);
  CHECK(r.eps_achieved <= 1e-3);
  CHECK(r.eps_certified > 0.0);  // certification always runs here
  CHECK(rel_err(r.delta_seconds, static_cast<double>(r.delta_star) * 3e-6) < 1e-15);

  CHECK(wetfb_min_delay(p.h, 216, 1e-3, 300, 200, 0, WETFB_EVAL_CLOSED_FORM, 5000, &r) ==
        WETFB_ERR_INVALID);
}

TEST_CASE("fixed-delay error minimization through the C API") {
  const Params p(reference_spec());
  wetfb_opt_result r;
  REQUIRE(wetfb_min_error_given_delay(p.h, 216, 800, 1, WETFB_EVAL_CLOSED_FORM, &r) == WETFB_OK);
  CHECK(std::isnan(r.eps_target));  // no target in this mode
  CHECK(r.feasible == 1);
  CHECK(r.delta_star == 800);
  CHECK(r.n_star + r.v_star == 800);
  CHECK(r.n_star >= 1);
  CHECK(r.eps_achieved > 0.0);
  CHECK(r.eps_achieved < 1.0);
  CHECK(r.eps_certified > 0.0);
  CHECK(r.evaluator == WETFB_EVAL_CLOSED_FORM);

  CHECK(wetfb_min_error_given_delay(p.h, 216, 1, 1, WETFB_EVAL_CLOSED_FORM, &r) ==
        WETFB_ERR_INVALID);
}

TEST_CASE("fixed-power baseline through the C API") {
  const Params p(reference_spec());
  wetfb_opt_result r;
  double p_hat = 0.0;
  REQUIRE(wetfb_best_fixed_power(p.h, 216, 3000, 1, 1e-9, 1.0, &p_hat, &r) == WETFB_OK);
  CHECK(p_hat >= 1e-9);
  CHECK(p_hat <= 1.0);
  CHECK(std::isnan(r.eps_target));
  CHECK(r.delta_star == 3000);
  CHECK(r.v_star == 3000 - r.n_star);
  CHECK(r.evaluator == -1);  // no adaptive loop evaluator involved
  CHECK(r.eps_achieved > 0.0);
  CHECK(r.eps_achieved < 1.0);

  // The adaptive allocation at the same delay does at least as well.
  wetfb_opt_result ad;
  REQUIRE(wetfb_min_error_given_delay(p.h, 216, 3000, 1, WETFB_EVAL_CLOSED_FORM, &ad) == WETFB_OK);
  CHECK(r.eps_achieved >= ad.eps_achieved * 0.999);

  CHECK(wetfb_best_fixed_power(p.h, 216, 3000, 1, 1e-9, 1.0, nullptr, &r) == WETFB_ERR_NULL_PTR);
  CHECK(wetfb_best_fixed_power(p.h, 216, 3000, 1, 0.0, 1.0, &p_hat, &r) == WETFB_ERR_INVALID);
}
