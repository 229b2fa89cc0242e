#include "scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace wetfb_cli {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ScenarioError("empty value for config key '" + key + "'");
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ScenarioError("malformed number for config key '" + key + "': " + t);
  return x;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ScenarioError("empty value for config key '" + key + "'");
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ScenarioError("malformed integer for config key '" + key + "': " + t);
  return x;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string piece =
        trim(comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start));
    if (!piece.empty()) parts.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> xs;
  for (const auto& piece : split_list(text)) xs.push_back(parse_real(key, piece));
  return xs;
}

std::vector<long long> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<long long> xs;
  for (const auto& piece : split_list(text)) xs.push_back(parse_int(key, piece));
  return xs;
}

const std::set<std::string> kAllowedKeys = {
    "m",          "eta",        "alpha",     "d_m",          "kappa",      "kappa_db",
    "p_d_w",      "p_d_dbm",    "sigma2_d_w", "sigma2_d_dbm", "t_c_s",      "k_bits",
    "eps_target", "n_min",      "n_max",     "n_points",     "n_step",     "n_floor",
    "delta",      "v_max",      "mc_samples", "mc_shards",    "seed",       "quad_rel_tol",
    "p_min_w",    "p_max_w",    "eps0_list", "k_list",       "delta_list", "grid_m",
    "grid_k",     "grid_n",     "grid_eps",  "out",
};

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("cannot open config file: " + path);

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("line " + std::to_string(lineno) + ": expected key = value: " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ScenarioError("line " + std::to_string(lineno) + ": empty key");
    if (!kAllowedKeys.count(key)) throw ScenarioError("unknown config key '" + key + "'");
    if (kv.count(key)) throw ScenarioError("duplicate config key '" + key + "'");
    kv[key] = value;
  }

  const auto has = [&](const char* key) { return kv.count(key) != 0; };
  const auto need_real = [&](const char* key) {
    if (!has(key)) throw ScenarioError(std::string("missing required config key '") + key + "'");
    return parse_real(key, kv[key]);
  };

  // dBm/watt (and dB/linear) dual keys: exactly one per quantity.
  const auto dual = [&](const char* a, const char* b) {
    if (has(a) == has(b))
      throw ScenarioError(std::string("exactly one of '") + a + "' or '" + b +
                          "' must be set");
  };
  dual("p_d_w", "p_d_dbm");
  dual("sigma2_d_w", "sigma2_d_dbm");
  dual("kappa", "kappa_db");

  Scenario sc;
  sc.m = need_real("m");
  sc.eta = need_real("eta");
  sc.alpha = need_real("alpha");
  sc.d_m = need_real("d_m");
  sc.t_c_s = need_real("t_c_s");
  sc.p_d_w = has("p_d_w") ? parse_real("p_d_w", kv["p_d_w"])
                          : dbm_to_watt(parse_real("p_d_dbm", kv["p_d_dbm"]));
  sc.sigma2_d_w = has("sigma2_d_w")
                      ? parse_real("sigma2_d_w", kv["sigma2_d_w"])
                      : dbm_to_watt(parse_real("sigma2_d_dbm", kv["sigma2_d_dbm"]));
  sc.kappa = has("kappa") ? parse_real("kappa", kv["kappa"])
                          : db_to_linear(parse_real("kappa_db", kv["kappa_db"]));

  if (!has("k_bits")) throw ScenarioError("missing required config key 'k_bits'");
  sc.k_bits = parse_int("k_bits", kv["k_bits"]);

  if (has("eps_target")) sc.eps_target = parse_real("eps_target", kv["eps_target"]);
  if (has("n_min")) sc.n_min = parse_int("n_min", kv["n_min"]);
  if (has("n_max")) sc.n_max = parse_int("n_max", kv["n_max"]);
  if (has("n_points")) sc.n_points = parse_int("n_points", kv["n_points"]);
  if (has("n_step")) sc.n_step = parse_int("n_step", kv["n_step"]);
  if (has("n_floor")) sc.n_floor = parse_int("n_floor", kv["n_floor"]);
  if (has("delta")) sc.delta = parse_int("delta", kv["delta"]);
  if (has("v_max")) sc.v_max = parse_int("v_max", kv["v_max"]);
  if (has("mc_samples")) sc.mc_samples = parse_int("mc_samples", kv["mc_samples"]);
  if (has("mc_shards")) sc.mc_shards = static_cast<int>(parse_int("mc_shards", kv["mc_shards"]));
  if (has("seed"))
    sc.seed = static_cast<unsigned long long>(parse_int("seed", kv["seed"]));
  if (has("quad_rel_tol")) sc.quad_rel_tol = parse_real("quad_rel_tol", kv["quad_rel_tol"]);
  if (has("p_min_w")) sc.p_min_w = parse_real("p_min_w", kv["p_min_w"]);
  if (has("p_max_w")) sc.p_max_w = parse_real("p_max_w", kv["p_max_w"]);
  if (has("eps0_list")) sc.eps0_list = parse_real_list("eps0_list", kv["eps0_list"]);
  if (has("k_list")) sc.k_list = parse_int_list("k_list", kv["k_list"]);
  if (has("delta_list")) sc.delta_list = parse_int_list("delta_list", kv["delta_list"]);
  if (has("grid_m")) sc.grid_m = parse_real_list("grid_m", kv["grid_m"]);
  if (has("grid_k")) sc.grid_k = parse_int_list("grid_k", kv["grid_k"]);
  if (has("grid_n")) sc.grid_n = parse_int_list("grid_n", kv["grid_n"]);
  if (has("grid_eps")) sc.grid_eps = parse_real_list("grid_eps", kv["grid_eps"]);
  if (has("out")) sc.out = kv["out"];

  return sc;
}

}  // namespace wetfb_cli
