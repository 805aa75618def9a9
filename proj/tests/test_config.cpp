#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ringheom/config.hpp"

using namespace ringheom;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const char* name, const std::string& text) {
  fs::path file = fs::temp_directory_path() / name;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  REQUIRE(bool(out));
  return file;
}

}  // namespace

TEST_CASE("apply_key parses each field type and rejects malformed text") {
  RunConfig cfg;

  apply_key(cfg, "ring.mass", "0.75");
  CHECK(cfg.ring.mass == 0.75);
  apply_key(cfg, "bath.eta", "1e-4");
  CHECK(cfg.bath.eta == 1e-4);
  apply_key(cfg, "grid.n_theta", "32");
  CHECK(cfg.n_theta == 32);
  apply_key(cfg, "run.model", "cl");
  CHECK(cfg.model == "cl");
  apply_key(cfg, "output.dir", "some/place");
  CHECK(cfg.out_dir == "some/place");

  apply_key(cfg, "current.allow_markovian", "true");
  CHECK(cfg.allow_markovian_current);
  apply_key(cfg, "current.allow_markovian", "0");
  CHECK_FALSE(cfg.allow_markovian_current);
  CHECK_THROWS_AS(apply_key(cfg, "current.allow_markovian", "yes"), std::invalid_argument);

  apply_key(cfg, "current.flux", "0, 0.25 ,0.5");
  CHECK(cfg.flux == std::vector<double>{0.0, 0.25, 0.5});
  apply_key(cfg, "kernel.k_list", "0,2,4");
  CHECK(cfg.kernel_k_list == std::vector<int>{0, 2, 4});

  CHECK_THROWS_AS(apply_key(cfg, "grid.dp", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "grid.dp", "1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "grid.n_max", "5000000000"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "no.such_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "current.flux", "0.1,,0.2"), std::invalid_argument);
}

TEST_CASE("config files: sections, comments, and later lines override") {
  const fs::path file = write_file("ringheom_cfg_ok.ini",
                                   "# leading comment\n"
                                   "[run]\n"
                                   "model = cl\n"
                                   "regime = markovian\n"
                                   "\n"
                                   "[bath]\n"
                                   "; alternate comment marker\n"
                                   "eta = 0.5\n"
                                   "beta = 1.25\n"
                                   "[grid]\n"
                                   "n_p = 64\n"
                                   "dp=0.5\n"
                                   "[bath]\n"
                                   "eta = 0.25\n");
  RunConfig cfg;
  apply_config_file(cfg, file);
  CHECK(cfg.model == "cl");
  CHECK(cfg.regime == "markovian");
  CHECK(cfg.bath.eta == 0.25);
  CHECK(cfg.bath.beta == 1.25);
  CHECK(cfg.n_p == 64);
  CHECK(cfg.dp == 0.5);
}

TEST_CASE("config files: malformed input names the offending line") {
  RunConfig cfg;

  const fs::path unterminated = write_file("ringheom_cfg_bad1.ini", "[run]\nmodel = cl\n[grid\n");
  CHECK_THROWS_WITH_AS(apply_config_file(cfg, unterminated),
                       doctest::Contains(":3"), std::invalid_argument);

  const fs::path no_section = write_file("ringheom_cfg_bad2.ini", "model = cl\n");
  CHECK_THROWS_WITH_AS(apply_config_file(cfg, no_section),
                       doctest::Contains(":1"), std::invalid_argument);

  const fs::path no_equals = write_file("ringheom_cfg_bad3.ini", "[run]\nmodel cl\n");
  CHECK_THROWS_WITH_AS(apply_config_file(cfg, no_equals),
                       doctest::Contains(":2"), std::invalid_argument);

  CHECK_THROWS_AS(apply_config_file(cfg, fs::temp_directory_path() / "ringheom_cfg_missing.ini"),
                  std::invalid_argument);
}

TEST_CASE("echoed configuration reproduces itself through apply_key") {
  RunConfig a;
  a.model = "cl";
  a.regime = "markovian";
  a.ring.mass = 2.0;
  a.ring.flux_bar = 0.3;
  a.bath.eta = 0.125;
  a.bath.beta = 0.7;
  a.pade_k = 6;
  a.n_trunc = 3;
  a.n_theta = 32;
  a.n_max = 15;
  a.dp = 1.0 / 3.0;
  a.tol = 1e-10;
  a.damping = 0.05;
  a.flux = {-0.5, 0.0, 1.0 / 7.0};
  a.allow_markovian_current = true;
  a.kernel_k_list = {1, 3};
  a.converge_n_list = {2, 4};
  a.out_dir = "elsewhere";

  const auto echoed = echo_config(a);
  RunConfig b;
  for (const auto& [key, value] : echoed) apply_key(b, key, value);
  CHECK(echo_config(b) == echoed);
}

TEST_CASE("validation rejects inconsistent setups") {
  CHECK_NOTHROW(RunConfig{}.validate());

  RunConfig cfg;
  cfg.model = "other";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.regime = "exact";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  // the high-temperature renormalization 1 - beta hbar^2 / (2 I) must stay
  // positive; the default beta = 2.5 on the default ring sits outside
  cfg = RunConfig{};
  cfg.regime = "markovian";
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg.bath.beta = 0.2;
  CHECK_NOTHROW(cfg.validate());

  cfg = RunConfig{};
  cfg.flux = {0.2, 0.1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.flux = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.dt = 500.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.pade_k = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.n_trunc = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.n_theta = 31;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.kernel_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.converge_n_list = {0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = RunConfig{};
  cfg.out_dir.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
