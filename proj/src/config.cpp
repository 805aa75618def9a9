#include "ringheom/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ringheom/io.hpp"

namespace ringheom {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for " + key);
}

double parse_double(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') bad_value(key, value);
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < -(1L << 30) || v > (1L << 30)) bad_value(key, value);
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      items.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  items.push_back(cur);
  return items;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const std::string& item : split_list(value)) out.push_back(parse_int(key, item));
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "run.model") {
    cfg.model = value;
  } else if (key == "run.regime") {
    cfg.regime = value;
  } else if (key == "ring.mass") {
    cfg.ring.mass = parse_double(key, value);
  } else if (key == "ring.radius") {
    cfg.ring.radius = parse_double(key, value);
  } else if (key == "ring.charge") {
    cfg.ring.charge = parse_double(key, value);
  } else if (key == "ring.flux_bar") {
    cfg.ring.flux_bar = parse_double(key, value);
  } else if (key == "bath.eta") {
    cfg.bath.eta = parse_double(key, value);
  } else if (key == "bath.gamma") {
    cfg.bath.gamma = parse_double(key, value);
  } else if (key == "bath.beta") {
    cfg.bath.beta = parse_double(key, value);
  } else if (key == "hierarchy.k") {
    cfg.pade_k = parse_int(key, value);
  } else if (key == "hierarchy.n_trunc") {
    cfg.n_trunc = parse_int(key, value);
  } else if (key == "grid.n_theta") {
    cfg.n_theta = parse_int(key, value);
  } else if (key == "grid.n_max") {
    cfg.n_max = parse_int(key, value);
  } else if (key == "grid.n_p") {
    cfg.n_p = parse_int(key, value);
  } else if (key == "grid.dp") {
    cfg.dp = parse_double(key, value);
  } else if (key == "integrate.tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "integrate.relax_horizon") {
    cfg.relax_horizon = parse_double(key, value);
  } else if (key == "integrate.relax_check_interval") {
    cfg.relax_check_interval = parse_double(key, value);
  } else if (key == "integrate.relax_eps") {
    cfg.relax_eps = parse_double(key, value);
  } else if (key == "spectrum.t_max") {
    cfg.t_max = parse_double(key, value);
  } else if (key == "spectrum.dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "spectrum.damping") {
    cfg.damping = parse_double(key, value);
  } else if (key == "current.flux") {
    cfg.flux = parse_double_list(key, value);
  } else if (key == "current.allow_markovian") {
    cfg.allow_markovian_current = parse_bool(key, value);
  } else if (key == "kernel.k_list") {
    cfg.kernel_k_list = parse_int_list(key, value);
  } else if (key == "kernel.t_max") {
    cfg.kernel_t_max = parse_double(key, value);
  } else if (key == "kernel.samples") {
    cfg.kernel_samples = parse_int(key, value);
  } else if (key == "kernel.matsubara_m") {
    cfg.matsubara_m = parse_int(key, value);
  } else if (key == "converge.k_list") {
    cfg.converge_k_list = parse_int_list(key, value);
  } else if (key == "converge.n_list") {
    cfg.converge_n_list = parse_int_list(key, value);
  } else if (key == "output.dir") {
    cfg.out_dir = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("config: cannot open " + file.string());
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw std::invalid_argument("config: malformed section at " + file.string() + ":" +
                                    std::to_string(lineno));
      }
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw std::invalid_argument("config: expected key = value at " + file.string() + ":" +
                                  std::to_string(lineno));
    }
    apply_key(cfg, section + "." + trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
}

std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg) {
  const auto d = [](double v) { return format_double(v); };
  const auto i = [](int v) { return std::to_string(v); };
  return {
      {"run.model", cfg.model},
      {"run.regime", cfg.regime},
      {"ring.mass", d(cfg.ring.mass)},
      {"ring.radius", d(cfg.ring.radius)},
      {"ring.charge", d(cfg.ring.charge)},
      {"ring.flux_bar", d(cfg.ring.flux_bar)},
      {"bath.eta", d(cfg.bath.eta)},
      {"bath.gamma", d(cfg.bath.gamma)},
      {"bath.beta", d(cfg.bath.beta)},
      {"hierarchy.k", i(cfg.pade_k)},
      {"hierarchy.n_trunc", i(cfg.n_trunc)},
      {"grid.n_theta", i(cfg.n_theta)},
      {"grid.n_max", i(cfg.n_max)},
      {"grid.n_p", i(cfg.n_p)},
      {"grid.dp", d(cfg.dp)},
      {"integrate.tol", d(cfg.tol)},
      {"integrate.relax_horizon", d(cfg.relax_horizon)},
      {"integrate.relax_check_interval", d(cfg.relax_check_interval)},
      {"integrate.relax_eps", d(cfg.relax_eps)},
      {"spectrum.t_max", d(cfg.t_max)},
      {"spectrum.dt", d(cfg.dt)},
      {"spectrum.damping", d(cfg.damping)},
      {"current.flux", join_doubles(cfg.flux)},
      {"current.allow_markovian", cfg.allow_markovian_current ? "true" : "false"},
      {"kernel.k_list", join_ints(cfg.kernel_k_list)},
      {"kernel.t_max", d(cfg.kernel_t_max)},
      {"kernel.samples", i(cfg.kernel_samples)},
      {"kernel.matsubara_m", i(cfg.matsubara_m)},
      {"converge.k_list", join_ints(cfg.converge_k_list)},
      {"converge.n_list", join_ints(cfg.converge_n_list)},
      {"output.dir", cfg.out_dir},
  };
}

void RunConfig::validate() const {
  if (model != "risb" && model != "cl") {
    throw std::invalid_argument("config: run.model must be risb or cl");
  }
  if (regime != "markovian" && regime != "heom") {
    throw std::invalid_argument("config: run.regime must be markovian or heom");
  }
  ring.validate();
  bath.validate();
  ring_grid();
  cl_grid();
  if (regime == "heom") {
    if (pade_k < 0) throw std::invalid_argument("config: hierarchy.k must be >= 0");
    if (n_trunc < 1) throw std::invalid_argument("config: hierarchy.n_trunc must be >= 1");
  }
  if (regime == "markovian" && model == "risb") {
    beta_prime(ring, bath.beta);  // throws outside the validity window
  }
  if (!(tol > 0.0)) throw std::invalid_argument("config: integrate.tol must be > 0");
  if (!(relax_horizon > 0.0) || !(relax_check_interval > 0.0) || !(relax_eps > 0.0)) {
    throw std::invalid_argument("config: relaxation parameters must be > 0");
  }
  if (!(t_max > 0.0)) throw std::invalid_argument("config: spectrum.t_max must be > 0");
  if (!(dt > 0.0) || dt > t_max) {
    throw std::invalid_argument("config: spectrum.dt must lie in (0, t_max]");
  }
  if (damping < 0.0) throw std::invalid_argument("config: spectrum.damping must be >= 0");
  if (flux.empty()) throw std::invalid_argument("config: current.flux must be nonempty");
  for (std::size_t k = 1; k < flux.size(); ++k) {
    if (!(flux[k] > flux[k - 1])) {
      throw std::invalid_argument("config: current.flux must increase strictly");
    }
  }
  if (kernel_k_list.empty() || converge_k_list.empty() || converge_n_list.empty()) {
    throw std::invalid_argument("config: k/n lists must be nonempty");
  }
  for (int k : kernel_k_list) {
    if (k < 0) throw std::invalid_argument("config: kernel.k_list entries must be >= 0");
  }
  for (int k : converge_k_list) {
    if (k < 0) throw std::invalid_argument("config: converge.k_list entries must be >= 0");
  }
  for (int n : converge_n_list) {
    if (n < 1) throw std::invalid_argument("config: converge.n_list entries must be >= 1");
  }
  if (kernel_t_max < 0.0) throw std::invalid_argument("config: kernel.t_max must be >= 0");
  if (kernel_samples < 2) throw std::invalid_argument("config: kernel.samples must be >= 2");
  if (matsubara_m < 1) throw std::invalid_argument("config: kernel.matsubara_m must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("config: output.dir must be nonempty");
}

}  // namespace ringheom
