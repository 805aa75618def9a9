#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ringheom {

struct Rkf45Options {
  double tol = 1e-8;
  double h_min_factor = 1e-12;  // h_min = h_min_factor * (t1 - t0)
  double h_init = 0.0;          // 0 selects automatically from the RHS magnitude
  std::int64_t n_fields = 1;    // error norm: max over fields of scaled RMS
  std::function<void(const std::string&)> log;  // key=value line per accepted step
  std::function<double()> trace;                // optional extra log column
};

struct StepStats {
  std::int64_t n_accepted = 0;
  std::int64_t n_rejected = 0;
  double last_h = 0.0;
  double t_final = 0.0;
};

// Accepted-step record for dense output. The cubic Hermite interpolant of a
// linear observable is exact in the observable's values and derivatives at
// the step endpoints, so callers sample moments, not states.
template <typename Scalar>
struct StepRecord {
  double t0;
  double h;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y0;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y1;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1>& f0;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1>& f1;
};

struct HermiteWeights {
  double w_y0, w_y1, w_f0, w_f1;
};

// weights at sigma = (t - t0)/h; obs(t) = w_y0 obs0 + w_y1 obs1 + w_f0 dobs0 + w_f1 dobs1
inline HermiteWeights hermite_weights(double sigma, double h) {
  const double s2 = sigma * sigma;
  const double s3 = s2 * sigma;
  return {2.0 * s3 - 3.0 * s2 + 1.0, -2.0 * s3 + 3.0 * s2, h * (s3 - 2.0 * s2 + sigma),
          h * (s3 - s2)};
}

namespace detail {

template <typename Scalar>
double scaled_error_norm(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& err,
                         const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y,
                         const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y_new, double tol,
                         std::int64_t n_fields) {
  const std::int64_t n = err.size();
  const std::int64_t per = n / n_fields;
  const Scalar s_tol = Scalar(tol);
  double worst = 0.0;
  for (std::int64_t f = 0; f < n_fields; ++f) {
    const auto e = err.segment(f * per, per);
    const auto a = y.segment(f * per, per);
    const auto b = y_new.segment(f * per, per);
    const double sum =
        double((e / (s_tol * (Scalar(1) + a.abs().max(b.abs())))).square().sum());
    worst = std::max(worst, std::sqrt(sum / double(per)));
  }
  return worst;
}

}  // namespace detail

// Adaptive embedded 4(5) pair (Fehlberg tableau); advances with the
// fifth-order solution, controls the step on the embedded difference. The
// state evolves in place; rhs is autonomous: rhs(y, dy).
template <typename Scalar, typename Rhs, typename OnStep>
StepStats rkf45_propagate(Eigen::Array<Scalar, Eigen::Dynamic, 1>& y, Rhs&& rhs, double t0,
                          double t1, const Rkf45Options& opts, OnStep&& on_step) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  if (opts.tol <= 0.0) throw std::invalid_argument("rkf45_propagate: tol must be positive");
  if (t1 < t0) throw std::invalid_argument("rkf45_propagate: t1 must not precede t0");
  StepStats stats;
  stats.t_final = t0;
  if (t1 == t0) return stats;
  const double span = t1 - t0;
  const double h_min = opts.h_min_factor * span;
  const std::int64_t n = y.size();

  Array k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), ytmp(n), ynew(n), err(n), fnew(n);
  rhs(y, k1);

  double h = opts.h_init;
  if (h <= 0.0) {
    // magnitude-based guess, then capped by the span
    const double d0 =
        std::sqrt(double((y / (Scalar(1) + y.abs())).square().sum()) / double(n));
    const double d1 =
        std::sqrt(double((k1 / (Scalar(1) + y.abs())).square().sum()) / double(n));
    h = (d1 > 1e-300) ? 0.01 * (d0 + 1e-6) / d1 : span;
  }
  h = std::min(h, span);

  double t = t0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < h_min) {
      throw std::runtime_error("rkf45_propagate: step underflow at t=" + std::to_string(t) +
                               " h=" + std::to_string(h) +
                               " after accepted=" + std::to_string(stats.n_accepted) +
                               " rejected=" + std::to_string(stats.n_rejected));
    }

    ytmp = y + Scalar(h * 0.25) * k1;
    rhs(ytmp, k2);
    ytmp = y + Scalar(h * 3.0 / 32.0) * k1 + Scalar(h * 9.0 / 32.0) * k2;
    rhs(ytmp, k3);
    ytmp = y + Scalar(h * 1932.0 / 2197.0) * k1 - Scalar(h * 7200.0 / 2197.0) * k2 +
           Scalar(h * 7296.0 / 2197.0) * k3;
    rhs(ytmp, k4);
    ytmp = y + Scalar(h * 439.0 / 216.0) * k1 - Scalar(h * 8.0) * k2 +
           Scalar(h * 3680.0 / 513.0) * k3 - Scalar(h * 845.0 / 4104.0) * k4;
    rhs(ytmp, k5);
    ytmp = y - Scalar(h * 8.0 / 27.0) * k1 + Scalar(h * 2.0) * k2 -
           Scalar(h * 3544.0 / 2565.0) * k3 + Scalar(h * 1859.0 / 4104.0) * k4 -
           Scalar(h * 11.0 / 40.0) * k5;
    rhs(ytmp, k6);

    ynew = y + Scalar(h) * (Scalar(16.0 / 135.0) * k1 + Scalar(6656.0 / 12825.0) * k3 +
                            Scalar(28561.0 / 56430.0) * k4 - Scalar(9.0 / 50.0) * k5 +
                            Scalar(2.0 / 55.0) * k6);
    err = Scalar(h) * (Scalar(1.0 / 360.0) * k1 - Scalar(128.0 / 4275.0) * k3 -
                       Scalar(2197.0 / 75240.0) * k4 + Scalar(1.0 / 50.0) * k5 +
                       Scalar(2.0 / 55.0) * k6);

    const double err_norm =
        detail::scaled_error_norm<Scalar>(err, y, ynew, opts.tol, opts.n_fields);
    if (std::isfinite(err_norm) && err_norm <= 1.0) {
      const double t_new = t + h;
      rhs(ynew, fnew);
      if constexpr (!std::is_same_v<std::decay_t<OnStep>, std::nullptr_t>) {
        on_step(StepRecord<Scalar>{t, h, y, ynew, k1, fnew});
      }
      y.swap(ynew);
      k1.swap(fnew);
      t = t_new;
      ++stats.n_accepted;
      stats.last_h = h;
      stats.t_final = t;
      if (opts.log) {
        std::string line = "event=rkf45_step t=" + std::to_string(t) +
                           " h=" + std::to_string(h) + " err=" + std::to_string(err_norm);
        if (opts.trace) line += " trace=" + std::to_string(opts.trace());
        opts.log(line);
      }
      h *= (err_norm > 0.0) ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)))
                            : 5.0;
    } else {
      ++stats.n_rejected;
      h *= std::isfinite(err_norm)
               ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2))
               : 0.2;
    }
  }
  return stats;
}

template <typename Scalar, typename Rhs>
StepStats rkf45_propagate(Eigen::Array<Scalar, Eigen::Dynamic, 1>& y, Rhs&& rhs, double t0,
                          double t1, const Rkf45Options& opts) {
  return rkf45_propagate(y, std::forward<Rhs>(rhs), t0, t1, opts, nullptr);
}

struct RelaxOptions {
  double horizon = 1e4;
  double check_interval = 10.0;
  double eps = 1e-10;
  Rkf45Options step;
};

// Propagates until the primary block (leading primary_size entries) moves by
// less than eps in sup norm per check interval. An input already stationary
// to that tolerance returns without stepping.
template <typename Scalar, typename Rhs>
StepStats relax_to_steady_state(Eigen::Array<Scalar, Eigen::Dynamic, 1>& y, Rhs&& rhs,
                                std::int64_t primary_size, const RelaxOptions& opts) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  if (opts.eps <= 0.0) throw std::invalid_argument("relax_to_steady_state: eps must be positive");
  Array dy(y.size());
  rhs(y, dy);
  // stationarity precheck over the whole state: a zero primary derivative
  // alone can be transient while deeper fields are still charging up
  const double rate = double(dy.abs().maxCoeff());
  StepStats total;
  if (rate * opts.check_interval < opts.eps) return total;

  Array prev(primary_size);
  double t = 0.0;
  double delta = 0.0;
  while (t < opts.horizon) {
    prev = y.head(primary_size);
    const StepStats s = rkf45_propagate(y, rhs, t, t + opts.check_interval, opts.step);
    t += opts.check_interval;
    total.n_accepted += s.n_accepted;
    total.n_rejected += s.n_rejected;
    total.last_h = s.last_h;
    total.t_final = t;
    delta = double((y.head(primary_size) - prev).abs().maxCoeff());
    if (opts.step.log) {
      opts.step.log("event=relax_check t=" + std::to_string(t) +
                    " delta=" + std::to_string(delta));
    }
    if (delta < opts.eps) return total;
  }
  throw std::runtime_error("relax_to_steady_state: horizon " + std::to_string(opts.horizon) +
                           " exhausted, last delta=" + std::to_string(delta));
}

// One linear functional row of the bordered steady-state system: the
// operator row `replace_row` is dropped in favor of sum_i weights_i x_i = rhs.
struct LinearConstraint {
  std::vector<std::pair<std::int64_t, double>> weights;
  double rhs = 0.0;
  std::int64_t replace_row = 0;
};

struct SteadyStateOptions {
  double residual_tol = 1e-10;
  std::int64_t direct_limit = 200000;  // above this, switch to preconditioned GMRES
  bool force_iterative = false;
  std::function<void(const std::string&)> log;
};

struct SteadyStateResult {
  Eigen::ArrayXd solution;
  double residual = 0.0;       // ||L x|| / ||x|| against the unmodified operator
  double constraint_err = 0.0;
};

// Solves L x = 0 with the given normalization/nullspace constraints replacing
// redundant operator rows. emit calls its sink once per matrix term.
SteadyStateResult implicit_steady_state(
    std::int64_t dim,
    const std::function<void(const std::function<void(std::int64_t, std::int64_t, double)>&)>&
        emit,
    const std::vector<LinearConstraint>& constraints, const SteadyStateOptions& opts = {});

}  // namespace ringheom
