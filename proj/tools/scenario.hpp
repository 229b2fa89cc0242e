#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wetfb/wetfb.h"

namespace wetfb_cli {

// Raised on any config defect; the CLI maps it to exit code 2.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One scenario file, parsed and unit-normalized (powers in watts, kappa
// linear). Optional quantities keep their defaults when the key is absent.
struct Scenario {
  // Link physics (required; powers accepted as *_dbm or *_w dual keys).
  double m = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double d_m = 0.0;
  double kappa = 0.0;
  double p_d_w = 0.0;
  double sigma2_d_w = 0.0;
  double t_c_s = 0.0;

  // Message/optimization knobs.
  long long k_bits = 0;  // required
  double eps_target = 1e-5;
  long long n_min = 100;
  long long n_max = 5000;
  long long n_points = 40;
  long long n_step = 0;
  long long n_floor = 1;
  long long delta = 0;
  long long v_max = 1000000000LL;

  // Monte Carlo controls.
  long long mc_samples = 1000000;
  int mc_shards = 8;
  unsigned long long seed = 1;

  double quad_rel_tol = 1e-9;

  // Fixed-power search bounds [W].
  double p_min_w = 1e-9;
  double p_max_w = 1.0;

  // Sweep lists; empty lists fall back to the scalar keys above.
  std::vector<double> eps0_list;
  std::vector<long long> k_list;
  std::vector<long long> delta_list;

  // Validation grid.
  std::vector<double> grid_m = {1, 2, 3};
  std::vector<long long> grid_k = {96, 216, 320};
  std::vector<long long> grid_n = {100, 300, 1000};
  std::vector<double> grid_eps = {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.4};

  std::string out;  // output CSV path; --out overrides

  wetfb_params_spec params_spec() const {
    return wetfb_params_spec{m, eta, p_d_w, d_m, alpha, kappa, sigma2_d_w, t_c_s};
  }
};

// Parses a flat key=value file ('#' comments, blank lines allowed). Throws
// ScenarioError naming the offending key on unknown keys, missing required
// keys, malformed values, or a dBm/watt dual-key conflict.
Scenario load_scenario(const std::string& path);

double dbm_to_watt(double dbm);
double db_to_linear(double db);

}  // namespace wetfb_cli
