#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "ringheom/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
  ringheom::RunConfig cfg;
  std::string config_file;
  // flag-supplied key/value pairs, applied after the file in command order
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_key_option(CLI::App* cmd, Invocation& inv, const std::string& flag,
                    const std::string& key, const std::string& desc) {
  cmd->add_option_function<std::string>(
      flag, [&inv, key](const std::string& v) { inv.overrides.emplace_back(key, v); }, desc);
}

void add_common_options(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config_file, "key = value configuration file with [sections]");
  add_key_option(cmd, inv, "--model", "run.model", "risb or cl");
  add_key_option(cmd, inv, "--regime", "run.regime", "markovian or heom");
  add_key_option(cmd, inv, "--mass", "ring.mass", "particle mass");
  add_key_option(cmd, inv, "--radius", "ring.radius", "ring radius");
  add_key_option(cmd, inv, "--charge", "ring.charge", "particle charge");
  add_key_option(cmd, inv, "--flux-bar", "ring.flux_bar", "flux in flux quanta");
  add_key_option(cmd, inv, "--eta", "bath.eta", "system-bath coupling");
  add_key_option(cmd, inv, "--gamma", "bath.gamma", "bath cutoff frequency");
  add_key_option(cmd, inv, "--beta", "bath.beta", "inverse temperature");
  add_key_option(cmd, inv, "--k", "hierarchy.k", "number of low-temperature poles");
  add_key_option(cmd, inv, "--n-trunc", "hierarchy.n_trunc", "hierarchy depth");
  add_key_option(cmd, inv, "--n-theta", "grid.n_theta", "angle points");
  add_key_option(cmd, inv, "--n-max", "grid.n_max", "largest half-integer momentum index");
  add_key_option(cmd, inv, "--n-p", "grid.n_p", "continuous-model momentum points");
  add_key_option(cmd, inv, "--dp", "grid.dp", "continuous-model momentum spacing");
  add_key_option(cmd, inv, "--tol", "integrate.tol", "step error tolerance");
  add_key_option(cmd, inv, "--out", "output.dir", "output directory");
}

void add_relax_options(CLI::App* cmd, Invocation& inv) {
  add_key_option(cmd, inv, "--relax-horizon", "integrate.relax_horizon",
                 "maximum relaxation time");
  add_key_option(cmd, inv, "--relax-check", "integrate.relax_check_interval",
                 "time between stationarity checks");
  add_key_option(cmd, inv, "--relax-eps", "integrate.relax_eps",
                 "sup-norm change per check that counts as stationary");
}

fs::path resolve_out_dir(const std::string& dir) {
  fs::path p(dir);
  const char* root = std::getenv("RINGHEOM_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0' && p.is_relative()) return fs::path(root) / p;
  return p;
}

void write_manifest(const fs::path& out, const std::string& command,
                    const ringheom::RunConfig& cfg, double wall_seconds,
                    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = ringheom::kVersion;
  j["wall_time_seconds"] = wall_seconds;
  nlohmann::ordered_json conf;
  for (const auto& [key, value] : ringheom::echo_config(cfg)) conf[key] = value;
  j["config"] = conf;
  j["outputs"] = outputs;
  std::ofstream f(out / "manifest.json");
  if (!f) throw std::runtime_error("cannot write " + (out / "manifest.json").string());
  f << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charged ring in a dissipative environment: equilibrium, response, currents"};
  app.require_subcommand(1);
  Invocation inv;

  CLI::App* eq = app.add_subcommand("equilibrium", "steady-state momentum distribution");
  CLI::App* sp = app.add_subcommand("spectrum", "orientation response and absorption spectrum");
  CLI::App* cu = app.add_subcommand("current", "persistent current over a flux sweep");
  CLI::App* kc = app.add_subcommand("kernel-check",
                                    "bath kernel decomposition against the exact pole series");
  CLI::App* cv = app.add_subcommand("converge", "current against hierarchy cutoffs");

  for (CLI::App* c : {eq, sp, cu, kc, cv}) add_common_options(c, inv);
  for (CLI::App* c : {eq, sp}) add_relax_options(c, inv);

  add_key_option(sp, inv, "--t-max", "spectrum.t_max", "response horizon");
  add_key_option(sp, inv, "--dt", "spectrum.dt", "sample spacing");
  add_key_option(sp, inv, "--damping", "spectrum.damping", "transform window rate (0 = auto)");

  add_key_option(cu, inv, "--flux", "current.flux", "comma-separated flux values, increasing");
  cu->add_flag_callback(
      "--allow-markovian",
      [&inv] { inv.overrides.emplace_back("current.allow_markovian", "true"); },
      "permit the Markovian regime for the sweep");

  add_key_option(kc, inv, "--k-list", "kernel.k_list", "comma-separated pole counts");
  add_key_option(kc, inv, "--kernel-t-max", "kernel.t_max", "time window (0 = 5/gamma)");
  add_key_option(kc, inv, "--samples", "kernel.samples", "time samples");
  add_key_option(kc, inv, "--matsubara-m", "kernel.matsubara_m", "exact poles in the arbiter");

  add_key_option(cv, inv, "--k-list", "converge.k_list", "comma-separated pole counts");
  add_key_option(cv, inv, "--n-list", "converge.n_list", "comma-separated hierarchy depths");

  CLI11_PARSE(app, argc, argv);

  std::string command;
  std::vector<std::string> (*run)(const ringheom::RunConfig&, const fs::path&) = nullptr;
  if (eq->parsed()) {
    command = "equilibrium";
    run = ringheom::cli::cmd_equilibrium;
  } else if (sp->parsed()) {
    command = "spectrum";
    run = ringheom::cli::cmd_spectrum;
  } else if (cu->parsed()) {
    command = "current";
    run = ringheom::cli::cmd_current;
  } else if (kc->parsed()) {
    command = "kernel-check";
    run = ringheom::cli::cmd_kernel_check;
  } else {
    command = "converge";
    run = ringheom::cli::cmd_converge;
  }

  fs::path out;
  try {
    if (!inv.config_file.empty()) ringheom::apply_config_file(inv.cfg, inv.config_file);
    for (const auto& [key, value] : inv.overrides) ringheom::apply_key(inv.cfg, key, value);
    inv.cfg.validate();
    out = resolve_out_dir(inv.cfg.out_dir);
    fs::create_directories(out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> outputs = run(inv.cfg, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out, command, inv.cfg, wall, outputs);
    std::printf("%s: wrote %zu artifacts to %s\n", command.c_str(), outputs.size(),
                out.string().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::ofstream diag(out / "error.txt");
    diag << command << " failed: " << e.what() << '\n';
    return 1;
  }
}
