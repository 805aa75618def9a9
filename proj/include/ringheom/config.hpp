#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ringheom/dynamics_cl.hpp"
#include "ringheom/dynamics_risb.hpp"

namespace ringheom {

// One run, fully described. Defaults reproduce the reference setup: a unit
// ring with m_S = 1/2 and q = -1 coupled to a Drude bath with eta = 1e-3,
// gamma = 1, beta = 5/2, resolved on a 63 x 64 ring grid (128 x 64 for the
// continuous reference model).
struct RunConfig {
  // [run]
  std::string model = "risb";   // risb | cl
  std::string regime = "heom";  // markovian | heom

  // [ring]  mass, radius, charge, flux_bar
  RingParams ring;

  // [bath]  eta, gamma, beta
  BathSpec bath;

  // [hierarchy]
  int pade_k = 4;
  int n_trunc = 2;

  // [grid]
  int n_theta = 64;
  int n_max = 31;
  int n_p = 128;
  double dp = 0.25;

  // [integrate]
  double tol = 1e-8;
  double relax_horizon = 20000.0;
  double relax_check_interval = 10.0;
  double relax_eps = 1e-9;

  // [spectrum]
  double t_max = 200.0;
  double dt = 0.1;
  double damping = 0.0;  // 0 selects 2 pi / t_max

  // [current]
  std::vector<double> flux = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  bool allow_markovian_current = false;

  // [kernel]
  std::vector<int> kernel_k_list = {0, 1, 2, 3, 4, 5, 6};
  double kernel_t_max = 0.0;  // 0 selects 5 / gamma
  int kernel_samples = 201;
  int matsubara_m = 1000;

  // [converge]
  std::vector<int> converge_k_list = {2, 3, 4};
  std::vector<int> converge_n_list = {1, 2, 3};

  // [output]
  std::string out_dir = "run";

  RingGrid ring_grid() const { return make_grid(n_theta, n_max); }
  CLGrid cl_grid() const { return make_cl_grid(n_p, dp, n_theta); }

  // Cross-field checks; throws std::invalid_argument (or std::domain_error
  // when the Markovian temperature renormalization leaves its validity
  // window) naming the offending key.
  void validate() const;
};

// Sets one field addressed as "section.key" from its text form; unknown keys
// and malformed values throw std::invalid_argument.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// key = value lines under [section] headers; blank lines and lines starting
// with '#' or ';' are ignored. Later lines override earlier ones.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& file);

// Every key with its current value, in a fixed emission order. Feeding the
// pairs back through apply_key reproduces the configuration.
std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg);

}  // namespace ringheom
