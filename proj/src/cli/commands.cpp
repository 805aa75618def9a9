#include "commands.hpp"

#include <complex>
#include <fstream>
#include <memory>

#include "ringheom/io.hpp"
#include "ringheom/observables.hpp"
#include "ringheom/steady.hpp"

namespace fs = std::filesystem;

namespace ringheom::cli {

namespace {

// Shared sink for the solvers' structured event lines.
class RunLog {
 public:
  explicit RunLog(const fs::path& file) : out_(file) {
    if (!out_) throw std::runtime_error("cannot open " + file.string() + " for writing");
  }
  std::function<void(const std::string&)> sink() {
    return [this](const std::string& line) { out_ << line << '\n'; };
  }

 private:
  std::ofstream out_;
};

SteadyStateOptions solver_opts(const RunConfig& cfg, RunLog& log) {
  SteadyStateOptions opts;
  opts.log = log.sink();
  (void)cfg;
  return opts;
}

RelaxOptions relax_opts(const RunConfig& cfg, std::int64_t n_fields, RunLog& log) {
  RelaxOptions opts;
  opts.horizon = cfg.relax_horizon;
  opts.check_interval = cfg.relax_check_interval;
  opts.eps = cfg.relax_eps;
  opts.step.tol = cfg.tol;
  opts.step.n_fields = n_fields;
  opts.step.log = log.sink();
  return opts;
}

Rkf45Options step_opts(const RunConfig& cfg, RunLog& log) {
  Rkf45Options opts;
  opts.tol = cfg.tol;
  opts.log = log.sink();
  return opts;
}

std::shared_ptr<const HierarchySpace> ring_space(const RunConfig& cfg) {
  return std::make_shared<const HierarchySpace>(enumerate_hierarchy(cfg.pade_k, cfg.n_trunc));
}

std::shared_ptr<const HierarchySpace> cl_space(const RunConfig& cfg) {
  return std::make_shared<const HierarchySpace>(make_hierarchy(cfg.pade_k + 1, cfg.n_trunc));
}

CheckpointMeta run_meta(const RunConfig& cfg) {
  CheckpointMeta meta;
  meta.model = cfg.model;
  meta.K = cfg.pade_k;
  meta.n_trunc = cfg.n_trunc;
  meta.bath = cfg.bath;
  meta.ring = cfg.ring;
  return meta;
}

AdoStack equilibrate(const RunConfig& cfg, const RisbGenerator& gen, RunLog& log) {
  AdoStack stack = boltzmann_stack(gen.space_ptr(), gen.grid(), gen.ring(), cfg.bath.beta);
  AdoStack in(gen.space_ptr(), gen.grid()), out(gen.space_ptr(), gen.grid());
  const auto rhs = [&](const Eigen::ArrayXd& y, Eigen::ArrayXd& dy) {
    in.data = y;
    gen.apply(in, out);
    dy = out.data;
  };
  relax_to_steady_state(stack.data, rhs, stack.points(), relax_opts(cfg, stack.space->size(), log));
  return stack;
}

CLStack equilibrate(const RunConfig& cfg, const CLGenerator& gen, RunLog& log) {
  CLStack stack = cl_gaussian_stack(gen.space_ptr(), gen.grid(), gen.ring(), cfg.bath.beta);
  CLStack in(gen.space_ptr(), gen.grid()), out(gen.space_ptr(), gen.grid());
  const auto rhs = [&](const Eigen::ArrayXd& y, Eigen::ArrayXd& dy) {
    in.data = y;
    gen.apply(in, out);
    dy = out.data;
  };
  relax_to_steady_state(stack.data, rhs, stack.points(), relax_opts(cfg, stack.space->size(), log));
  return stack;
}

void write_pdist(const fs::path& file, const MomentumDistribution& dist, bool integer_labels) {
  Eigen::ArrayXd labels = integer_labels ? dist.n.cast<double>().eval() : dist.p;
  write_csv(file, {"n_or_p", "value"}, {&labels, &dist.weight});
}

}  // namespace

std::vector<std::string> cmd_equilibrium(const RunConfig& cfg, const fs::path& out) {
  std::vector<std::string> files;
  RunLog log(out / "run.log");
  files.push_back("run.log");
  MomentumDistribution dist;

  if (cfg.model == "risb") {
    const RingGrid grid = cfg.ring_grid();
    if (cfg.regime == "markovian") {
      const RisbMarkovianGenerator gen(cfg.ring, cfg.bath, {}, grid);
      const WignerField w = steady_state(gen, solver_opts(cfg, log));
      dist = momentum_distribution(w);
      save_snapshot(out / "equilibrium.csv", w);
      files.insert(files.end(), {"equilibrium.csv", "equilibrium.csv.json"});
    } else {
      auto space = ring_space(cfg);
      const RisbGenerator gen(cfg.ring, cfg.bath, make_pade(cfg.bath, cfg.pade_k), {}, space,
                              grid);
      const AdoStack stack = equilibrate(cfg, gen, log);
      const WignerField w = stack.primary();
      dist = momentum_distribution(w);
      save_snapshot(out / "equilibrium.csv", w);
      save_checkpoint(out / "checkpoint", stack, run_meta(cfg));
      files.insert(files.end(), {"equilibrium.csv", "equilibrium.csv.json", "checkpoint"});
    }
    write_pdist(out / "pdist.csv", dist, true);
  } else {
    const CLGrid grid = cfg.cl_grid();
    if (cfg.regime == "markovian") {
      const CLMarkovianGenerator gen(cfg.ring, cfg.bath, grid);
      const CLField w = steady_state(gen, solver_opts(cfg, log));
      dist = momentum_distribution(w);
      save_snapshot(out / "equilibrium.csv", w);
      files.insert(files.end(), {"equilibrium.csv", "equilibrium.csv.json"});

      // analytic thermal marginal on the same rows, for side-by-side reading
      Eigen::ArrayXd p(grid.n_p);
      for (int i = 0; i < grid.n_p; ++i) p[i] = grid.p(i);
      const Eigen::ArrayXd ref = gaussian_reference(grid, cfg.ring, cfg.bath.beta);
      write_csv(out / "gaussian.csv", {"n_or_p", "value"}, {&p, &ref});
      files.push_back("gaussian.csv");
    } else {
      auto space = cl_space(cfg);
      const CLGenerator gen(cfg.ring, cfg.bath, make_pade(cfg.bath, cfg.pade_k), space, grid);
      const CLStack stack = equilibrate(cfg, gen, log);
      const CLField w = stack.primary();
      dist = momentum_distribution(w);
      save_snapshot(out / "equilibrium.csv", w);
      save_checkpoint(out / "checkpoint", stack, run_meta(cfg));
      files.insert(files.end(), {"equilibrium.csv", "equilibrium.csv.json", "checkpoint"});
    }
    write_pdist(out / "pdist.csv", dist, false);
  }
  files.push_back("pdist.csv");
  return files;
}

std::vector<std::string> cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
  std::vector<std::string> files;
  RunLog log(out / "run.log");
  files.push_back("run.log");

  ResponseSeries r1;
  if (cfg.model == "risb") {
    const RingGrid grid = cfg.ring_grid();
    if (cfg.regime == "markovian") {
      const RisbMarkovianGenerator gen(cfg.ring, cfg.bath, {}, grid);
      const WignerField eq = steady_state(gen, solver_opts(cfg, log));
      r1 = linear_response(eq, gen, cfg.t_max, cfg.dt, step_opts(cfg, log));
    } else {
      auto space = ring_space(cfg);
      const RisbGenerator gen(cfg.ring, cfg.bath, make_pade(cfg.bath, cfg.pade_k), {}, space,
                              cfg.ring_grid());
      const AdoStack eq = equilibrate(cfg, gen, log);
      r1 = linear_response(eq, gen, cfg.t_max, cfg.dt, step_opts(cfg, log));
    }
  } else {
    const CLGrid grid = cfg.cl_grid();
    if (cfg.regime == "markovian") {
      const CLMarkovianGenerator gen(cfg.ring, cfg.bath, grid);
      const CLField eq = steady_state(gen, solver_opts(cfg, log));
      r1 = linear_response(eq, gen, cfg.t_max, cfg.dt, step_opts(cfg, log));
    } else {
      auto space = cl_space(cfg);
      const CLGenerator gen(cfg.ring, cfg.bath, make_pade(cfg.bath, cfg.pade_k), space, grid);
      const CLStack eq = equilibrate(cfg, gen, log);
      r1 = linear_response(eq, gen, cfg.t_max, cfg.dt, step_opts(cfg, log));
    }
  }

  const double damping = cfg.damping > 0.0 ? cfg.damping : default_damping(cfg.t_max);
  const SpectrumResult s = spectrum(r1, damping);
  write_csv(out / "r1.csv", {"t", "value"}, {&r1.t, &r1.value});
  files.push_back("r1.csv");
  write_csv(out / "spectrum.csv", {"omega", "sigma"}, {&s.omega, &s.sigma});
  files.push_back("spectrum.csv");
  return files;
}

std::vector<std::string> cmd_current(const RunConfig& cfg, const fs::path& out) {
  if (cfg.model != "risb") {
    throw std::invalid_argument("current: requires run.model = risb (the reference model has no "
                                "flux-sensitive equilibrium current)");
  }
  if (cfg.regime != "heom" && !cfg.allow_markovian_current) {
    throw std::invalid_argument(
        "current: requires run.regime = heom; set current.allow_markovian to override");
  }
  std::vector<std::string> files;
  RunLog log(out / "run.log");
  files.push_back("run.log");

  const RingGrid grid = cfg.ring_grid();
  const int n = static_cast<int>(cfg.flux.size());
  Eigen::ArrayXd phi(n), cur(n);
  std::shared_ptr<const HierarchySpace> space;
  PadeDecomposition pade;
  if (cfg.regime == "heom") {
    space = ring_space(cfg);
    pade = make_pade(cfg.bath, cfg.pade_k);
  }
  for (int i = 0; i < n; ++i) {
    RingParams ring = cfg.ring;
    ring.flux_bar = cfg.flux[i];
    double residual = 0.0;
    if (cfg.regime == "heom") {
      const RisbGenerator gen(ring, cfg.bath, pade, {}, space, grid);
      const AdoStack stack = steady_state(gen, solver_opts(cfg, log), &residual);
      cur[i] = persistent_current(stack.primary(), ring, residual);
    } else {
      const RisbMarkovianGenerator gen(ring, cfg.bath, {}, grid);
      const WignerField w = steady_state(gen, solver_opts(cfg, log), &residual);
      cur[i] = persistent_current(w, ring, residual);
    }
    phi[i] = cfg.flux[i];
    log.sink()("event=current phi_bar=" + std::to_string(phi[i]) +
               " current=" + std::to_string(cur[i]));
  }

  CurrentSweep sweep;
  sweep.phi_bar = phi;
  sweep.current = cur;
  sweep.eta = cfg.bath.eta;
  sweep.beta = cfg.bath.beta;
  sweep.K = cfg.regime == "heom" ? cfg.pade_k : 0;
  sweep.n_trunc = cfg.regime == "heom" ? cfg.n_trunc : 0;
  sweep.validate();

  const Eigen::ArrayXd eta_col = Eigen::ArrayXd::Constant(n, sweep.eta);
  const Eigen::ArrayXd beta_col = Eigen::ArrayXd::Constant(n, sweep.beta);
  const Eigen::ArrayXd k_col = Eigen::ArrayXd::Constant(n, sweep.K);
  const Eigen::ArrayXd n_col = Eigen::ArrayXd::Constant(n, sweep.n_trunc);
  write_csv(out / "current.csv", {"phi_bar", "current", "eta", "beta", "K", "N_trunc"},
            {&sweep.phi_bar, &sweep.current, &eta_col, &beta_col, &k_col, &n_col});
  files.push_back("current.csv");
  return files;
}

std::vector<std::string> cmd_kernel_check(const RunConfig& cfg, const fs::path& out) {
  std::vector<std::string> files;
  const double t_max = cfg.kernel_t_max > 0.0 ? cfg.kernel_t_max : 5.0 / cfg.bath.gamma;
  const int n = cfg.kernel_samples;

  Eigen::ArrayXd t(n), re_m(n);
  std::vector<std::complex<double>> oracle(n);
  for (int i = 0; i < n; ++i) {
    t[i] = t_max * double(i) / double(n - 1);
    oracle[i] = matsubara_kernel(cfg.bath, cfg.matsubara_m, t[i]);
    re_m[i] = oracle[i].real();
  }

  Eigen::ArrayXd k_col(static_cast<int>(cfg.kernel_k_list.size()));
  Eigen::ArrayXd err_col(k_col.size());
  for (std::size_t ik = 0; ik < cfg.kernel_k_list.size(); ++ik) {
    const int K = cfg.kernel_k_list[ik];
    const PadeDecomposition pade = make_pade(cfg.bath, K);
    Eigen::ArrayXd re_p(n), im_p(n), err(n);
    for (int i = 0; i < n; ++i) {
      const std::complex<double> v = kernel(cfg.bath, pade, t[i]);
      re_p[i] = v.real();
      im_p[i] = v.imag();
      err[i] = std::abs(v - oracle[i]);
    }
    const std::string name = "kernel_K" + std::to_string(K) + ".csv";
    write_csv(out / name, {"t", "re_pade", "im_pade", "re_matsubara", "abs_err"},
              {&t, &re_p, &im_p, &re_m, &err});
    files.push_back(name);
    k_col[static_cast<int>(ik)] = K;
    err_col[static_cast<int>(ik)] = err.maxCoeff();
  }
  write_csv(out / "kernel_summary.csv", {"K", "max_abs_err"}, {&k_col, &err_col});
  files.push_back("kernel_summary.csv");
  return files;
}

std::vector<std::string> cmd_converge(const RunConfig& cfg, const fs::path& out) {
  if (cfg.model != "risb" || cfg.regime != "heom") {
    throw std::invalid_argument("converge: requires run.model = risb and run.regime = heom");
  }
  std::vector<std::string> files;
  RunLog log(out / "run.log");
  files.push_back("run.log");

  const RingGrid grid = cfg.ring_grid();
  const int rows = static_cast<int>(cfg.converge_k_list.size() * cfg.converge_n_list.size());
  Eigen::ArrayXd k_col(rows), n_col(rows), cur_col(rows);
  int r = 0;
  for (int K : cfg.converge_k_list) {
    const PadeDecomposition pade = make_pade(cfg.bath, K);
    for (int N : cfg.converge_n_list) {
      auto space = std::make_shared<const HierarchySpace>(enumerate_hierarchy(K, N));
      const RisbGenerator gen(cfg.ring, cfg.bath, pade, {}, space, grid);
      double residual = 0.0;
      const AdoStack stack = steady_state(gen, solver_opts(cfg, log), &residual);
      k_col[r] = K;
      n_col[r] = N;
      cur_col[r] = persistent_current(stack.primary(), cfg.ring, residual);
      log.sink()("event=converge K=" + std::to_string(K) + " n_trunc=" + std::to_string(N) +
                 " current=" + std::to_string(cur_col[r]));
      ++r;
    }
  }
  write_csv(out / "convergence.csv", {"K", "n_trunc", "current"}, {&k_col, &n_col, &cur_col});
  files.push_back("convergence.csv");
  return files;
}

}  // namespace ringheom::cli
