#include "ringheom/observables.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace ringheom {

double MomentumDistribution::mean() const { return (p * weight).sum() / weight.sum(); }

double MomentumDistribution::variance() const {
  const double m = mean();
  return ((p - m).square() * weight).sum() / weight.sum();
}

namespace {

void check_normalization(double tr) {
  if (std::abs(tr - 1.0) > 1e-4) {
    throw std::invalid_argument("momentum_distribution: state trace " + std::to_string(tr) +
                                " is not unit");
  }
}

void check_negativity(MomentumDistribution& d) {
  d.min_weight = d.weight.minCoeff();
  if (d.min_weight < -1e-10) {
    throw std::runtime_error("momentum_distribution: weight " +
                             std::to_string(d.min_weight) + " below the negativity floor");
  }
}

}  // namespace

MomentumDistribution momentum_distribution(const WignerField& w) {
  const double tr = trace(w);
  check_normalization(tr);
  const RingGrid& g = w.grid;
  MomentumDistribution d;
  d.n.resize(g.rows());
  d.p.resize(g.rows());
  d.weight = w.values.rowwise().sum() * (0.5 * kHbar * g.dtheta() / tr);
  for (int r = 0; r < g.rows(); ++r) {
    d.n[r] = r - g.n_max;
    d.p[r] = g.p(d.n[r]);
  }
  check_negativity(d);
  return d;
}

MomentumDistribution momentum_distribution(const CLField& w) {
  const double tr = cl_trace(w);
  check_normalization(tr);
  const CLGrid& g = w.grid;
  MomentumDistribution d;
  d.p.resize(g.n_p);
  d.weight = w.values.rowwise().sum() * (g.dtheta() / tr);
  for (int i = 0; i < g.n_p; ++i) d.p[i] = g.p(i);
  check_negativity(d);
  return d;
}

Eigen::ArrayXd gaussian_reference(const CLGrid& grid, const RingParams& ring, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("gaussian_reference: beta must be positive");
  const double a = ring.gauge_momentum();
  const double inv = beta / (2.0 * ring.inertia());
  Eigen::ArrayXd rho(grid.n_p);
  for (int i = 0; i < grid.n_p; ++i) {
    const double q = grid.p(i) - a;
    rho[i] = std::exp(-inv * q * q);
  }
  rho /= rho.sum() * grid.dp;
  return rho;
}

namespace {

// Samples weights . y(t) on a uniform grid while propagating; cubic Hermite
// interpolation of the moment between accepted steps is exact for the
// interpolant because the moment is linear in the state.
template <typename Rhs>
ResponseSeries sampled_moment_series(Eigen::ArrayXd y, Rhs&& rhs, const Eigen::ArrayXd& weights,
                                     double t_max, double dt_sample, Rkf45Options opts) {
  if (t_max <= 0.0 || dt_sample <= 0.0 || dt_sample > t_max) {
    throw std::invalid_argument("linear_response: need 0 < dt_sample <= t_max");
  }
  const auto moment = [&](const Eigen::ArrayXd& v) {
    return (weights * v.head(weights.size())).sum();
  };
  const auto n_samples = std::int64_t(std::floor(t_max / dt_sample + 1e-9)) + 1;
  ResponseSeries out;
  out.t = Eigen::ArrayXd::LinSpaced(n_samples, 0.0, dt_sample * double(n_samples - 1));
  out.value.resize(n_samples);
  out.value[0] = moment(y);
  std::int64_t next = 1;
  rkf45_propagate(y, rhs, 0.0, out.t[n_samples - 1], opts, [&](const StepRecord<double>& rec) {
    const double t1 = rec.t0 + rec.h;
    while (next < n_samples && out.t[next] <= t1 + 1e-12 * t_max) {
      const auto hw = hermite_weights((out.t[next] - rec.t0) / rec.h, rec.h);
      out.value[next] = hw.w_y0 * moment(rec.y0) + hw.w_y1 * moment(rec.y1) +
                        hw.w_f0 * moment(rec.f0) + hw.w_f1 * moment(rec.f1);
      ++next;
    }
  });
  while (next < n_samples) out.value[next++] = moment(y);
  return out;
}

void check_stationary(double residual_sup, double state_sup) {
  if (!(residual_sup <= 1e-6 * state_sup)) {
    throw std::invalid_argument("linear_response: input state is not stationary, residual " +
                                std::to_string(residual_sup / state_sup));
  }
}

Eigen::ArrayXd ring_cos_weights(const RingGrid& g) {
  Eigen::ArrayXd w(std::int64_t(g.rows()) * g.n_theta);
  const double scale = 0.5 * kHbar * g.dtheta();
  for (int j = 0; j < g.n_theta; ++j) {
    w.segment(std::int64_t(j) * g.rows(), g.rows()).setConstant(scale * std::cos(g.theta(j)));
  }
  return w;
}

Eigen::ArrayXd cl_cos_weights(const CLGrid& g) {
  Eigen::ArrayXd w(std::int64_t(g.n_p) * g.n_theta);
  const double scale = g.dp * g.dtheta();
  for (int j = 0; j < g.n_theta; ++j) {
    w.segment(std::int64_t(j) * g.n_p, g.n_p).setConstant(scale * std::cos(g.theta(j)));
  }
  return w;
}

}  // namespace

ResponseSeries linear_response(const AdoStack& eq, const RisbGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts) {
  AdoStack rhs_eval(eq.space, eq.grid);
  gen.apply(eq, rhs_eval);
  check_stationary(rhs_eval.data.abs().maxCoeff(), eq.data.abs().maxCoeff());

  AdoStack kicked(eq.space, eq.grid);
  WignerField tmp(eq.grid);
  const Eigen::ArrayXd sin_theta =
      Eigen::ArrayXd::LinSpaced(eq.grid.n_theta, 0.0, eq.grid.dtheta() * (eq.grid.n_theta - 1))
          .sin();
  for (std::int64_t i = 0; i < eq.space->size(); ++i) {
    tmp.values = eq.field(i);
    const WignerField d = delta_p(tmp);
    kicked.field(i) = d.values.rowwise() * sin_theta.transpose();
  }

  Rkf45Options o = opts;
  o.n_fields = eq.space->size();
  AdoStack in_buf(eq.space, eq.grid), out_buf(eq.space, eq.grid);
  auto rhs = [&](const Eigen::ArrayXd& v, Eigen::ArrayXd& dv) {
    in_buf.data = v;
    gen.apply(in_buf, out_buf);
    dv = out_buf.data;
  };
  return sampled_moment_series(kicked.data, rhs, ring_cos_weights(eq.grid), t_max, dt_sample, o);
}

ResponseSeries linear_response(const WignerField& eq, const RisbMarkovianGenerator& gen,
                               double t_max, double dt_sample, const Rkf45Options& opts) {
  WignerField rhs_eval(eq.grid);
  gen.apply(eq, rhs_eval);
  check_stationary(rhs_eval.values.abs().maxCoeff(), eq.values.abs().maxCoeff());

  const WignerField d = delta_p(eq);
  const Eigen::ArrayXd sin_theta =
      Eigen::ArrayXd::LinSpaced(eq.grid.n_theta, 0.0, eq.grid.dtheta() * (eq.grid.n_theta - 1))
          .sin();
  Eigen::ArrayXXd kicked = d.values.rowwise() * sin_theta.transpose();
  Eigen::ArrayXd y = Eigen::Map<const Eigen::ArrayXd>(kicked.data(), kicked.size());

  WignerField in_buf(eq.grid), out_buf(eq.grid);
  auto rhs = [&](const Eigen::ArrayXd& v, Eigen::ArrayXd& dv) {
    in_buf.values =
        Eigen::Map<const Eigen::ArrayXXd>(v.data(), eq.grid.rows(), eq.grid.n_theta);
    gen.apply(in_buf, out_buf);
    dv = Eigen::Map<const Eigen::ArrayXd>(out_buf.values.data(), out_buf.values.size());
  };
  return sampled_moment_series(y, rhs, ring_cos_weights(eq.grid), t_max, dt_sample, opts);
}

ResponseSeries linear_response(const CLStack& eq, const CLGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts) {
  CLStack rhs_eval(eq.space, eq.grid);
  gen.apply(eq, rhs_eval);
  check_stationary(rhs_eval.data.abs().maxCoeff(), eq.data.abs().maxCoeff());

  CLStack kicked(eq.space, eq.grid);
  CLField tmp(eq.grid);
  const Eigen::ArrayXd sin_theta =
      Eigen::ArrayXd::LinSpaced(eq.grid.n_theta, 0.0, eq.grid.dtheta() * (eq.grid.n_theta - 1))
          .sin();
  for (std::int64_t i = 0; i < eq.space->size(); ++i) {
    tmp.values = eq.field(i);
    kicked.field(i) =
        cl_dp_deriv(tmp.values, eq.grid.dp).rowwise() * sin_theta.transpose();
  }

  Rkf45Options o = opts;
  o.n_fields = eq.space->size();
  CLStack in_buf(eq.space, eq.grid), out_buf(eq.space, eq.grid);
  auto rhs = [&](const Eigen::ArrayXd& v, Eigen::ArrayXd& dv) {
    in_buf.data = v;
    gen.apply(in_buf, out_buf);
    dv = out_buf.data;
  };
  return sampled_moment_series(kicked.data, rhs, cl_cos_weights(eq.grid), t_max, dt_sample, o);
}

ResponseSeries linear_response(const CLField& eq, const CLMarkovianGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts) {
  CLField rhs_eval(eq.grid);
  gen.apply(eq, rhs_eval);
  check_stationary(rhs_eval.values.abs().maxCoeff(), eq.values.abs().maxCoeff());

  const Eigen::ArrayXd sin_theta =
      Eigen::ArrayXd::LinSpaced(eq.grid.n_theta, 0.0, eq.grid.dtheta() * (eq.grid.n_theta - 1))
          .sin();
  Eigen::ArrayXXd kicked =
      cl_dp_deriv(eq.values, eq.grid.dp).rowwise() * sin_theta.transpose();
  Eigen::ArrayXd y = Eigen::Map<const Eigen::ArrayXd>(kicked.data(), kicked.size());

  CLField in_buf(eq.grid), out_buf(eq.grid);
  auto rhs = [&](const Eigen::ArrayXd& v, Eigen::ArrayXd& dv) {
    in_buf.values = Eigen::Map<const Eigen::ArrayXXd>(v.data(), eq.grid.n_p, eq.grid.n_theta);
    gen.apply(in_buf, out_buf);
    dv = Eigen::Map<const Eigen::ArrayXd>(out_buf.values.data(), out_buf.values.size());
  };
  return sampled_moment_series(y, rhs, cl_cos_weights(eq.grid), t_max, dt_sample, opts);
}

SpectrumResult spectrum(const ResponseSeries& r1, double damping) {
  if (damping < 0.0) throw std::invalid_argument("spectrum: damping must be nonnegative");
  const auto n = r1.t.size();
  if (n < 2 || r1.value.size() != n) {
    throw std::invalid_argument("spectrum: need at least two uniform samples");
  }
  const double dt = r1.t[1] - r1.t[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(r1.t[i] - r1.t[0] - double(i) * dt) > 1e-9 * std::max(1.0, r1.t[n - 1])) {
      throw std::invalid_argument("spectrum: sample times are not uniform");
    }
  }

  Eigen::Index n_pad = 1;
  while (n_pad < 8 * n) n_pad *= 2;
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n_pad), {0.0, 0.0});
  for (Eigen::Index i = 0; i < n; ++i) {
    in[std::size_t(i)] = r1.value[i] * std::exp(-damping * r1.t[i]);
  }
  std::vector<std::complex<double>> out(in.size());
  Eigen::FFT<double> fft;
  fft.fwd(out, in);

  SpectrumResult s;
  s.damping = damping;
  s.t_max = r1.t[n - 1];
  s.r1 = r1;
  const Eigen::Index n_half = n_pad / 2 + 1;
  s.omega.resize(n_half);
  s.sigma.resize(n_half);
  const double domega = 2.0 * M_PI / (double(n_pad) * dt);
  for (Eigen::Index k = 0; k < n_half; ++k) {
    s.omega[k] = double(k) * domega;
    // e^{+i omega t} transform: the imaginary part flips sign relative to
    // the engineering-sign DFT
    s.sigma[k] = -dt * out[std::size_t(k)].imag();
  }
  if (!s.sigma.allFinite()) throw std::runtime_error("spectrum: non-finite output");
  return s;
}

std::vector<Peak> find_peaks(const SpectrumResult& s, double min_frac) {
  std::vector<Peak> peaks;
  const double floor = min_frac * s.sigma.maxCoeff();
  for (Eigen::Index k = 1; k + 1 < s.sigma.size(); ++k) {
    if (s.sigma[k] >= floor && s.sigma[k] > s.sigma[k - 1] && s.sigma[k] > s.sigma[k + 1]) {
      peaks.push_back({s.omega[k], s.sigma[k]});
    }
  }
  return peaks;
}

double persistent_current(const WignerField& w, const RingParams& ring,
                          double equilibration_delta) {
  if (!(equilibration_delta < 1e-9)) {
    throw std::invalid_argument("persistent_current: state still drifts by " +
                                std::to_string(equilibration_delta) + " per unit time");
  }
  const RingGrid& g = w.grid;
  const double a = ring.gauge_momentum();
  const double scale = 2.0 * ring.omega0() / ring.flux_quantum();
  double j = 0.0;
  for (int r = 0; r < g.rows(); ++r) {
    j += (g.p(r - g.n_max) - a) * w.values.row(r).sum();
  }
  return scale * j * g.dp() * g.dtheta();
}

void CurrentSweep::validate() const {
  if (phi_bar.size() != current.size() || phi_bar.size() == 0) {
    throw std::invalid_argument("CurrentSweep: mismatched or empty columns");
  }
  if (!phi_bar.allFinite() || !current.allFinite()) {
    throw std::invalid_argument("CurrentSweep: non-finite entries");
  }
  for (Eigen::Index i = 1; i < phi_bar.size(); ++i) {
    if (!(phi_bar[i] > phi_bar[i - 1])) {
      throw std::invalid_argument("CurrentSweep: flux values must increase strictly");
    }
  }
}

double eigenenergy(int n, const RingParams& ring) {
  const double d = double(n) - ring.flux_bar;
  return kHbar * ring.omega0() * d * d;
}

double byers_yang_current(int n, const RingParams& ring) {
  return 2.0 * kHbar * ring.omega0() / ring.flux_quantum() * (double(n) - ring.flux_bar);
}

double byers_yang_thermal_current(const RingParams& ring, double beta, int n_range) {
  if (beta <= 0.0 || n_range < 1) {
    throw std::invalid_argument("byers_yang_thermal_current: bad beta or range");
  }
  double z = 0.0, acc = 0.0;
  for (int n = -n_range; n <= n_range; ++n) {
    const double w = std::exp(-beta * eigenenergy(n, ring));
    z += w;
    acc += w * byers_yang_current(n, ring);
  }
  return acc / z;
}

double transition_energy(int n, int sign, const RingParams& ring) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("transition_energy: sign must be +1 or -1");
  }
  return kHbar * ring.omega0() * (2.0 * std::abs(n) + 1.0 - 2.0 * double(sign) * ring.flux_bar);
}

}  // namespace ringheom
