#pragma once

#include <Eigen/Dense>

#include "ringheom/bath.hpp"

namespace ringheom {

// Charged particle on a ring threaded by a static flux. flux_bar is the
// flux in units of the flux quantum h/q.
struct RingParams {
  double mass = 0.5;
  double radius = 1.0;
  double charge = -1.0;
  double flux_bar = 0.0;

  double inertia() const { return mass * radius * radius; }
  double omega0() const { return kHbar / (2.0 * inertia()); }
  // q r0 A: the kinematic momentum offset induced by the gauge field.
  double gauge_momentum() const { return kHbar * flux_bar; }
  double flux_quantum() const { return 2.0 * M_PI * kHbar / charge; }

  void validate() const;
};

// Periodic ring grid: momentum rows p_n = n * hbar/2 for n in [-n_max, n_max]
// (even n carry populations, odd n carry coherences), angle columns
// theta_j = j * 2 pi / n_theta.
struct RingGrid {
  int n_theta = 64;
  int n_max = 31;

  int rows() const { return 2 * n_max + 1; }
  double dtheta() const { return 2.0 * M_PI / n_theta; }
  double dp() const { return 0.5 * kHbar; }
  double p(int n) const { return 0.5 * kHbar * n; }
  int row(int n) const { return n + n_max; }
  double theta(int j) const { return dtheta() * j; }

  bool operator==(const RingGrid&) const = default;
};

RingGrid make_grid(int n_theta, int n_max);

template <typename Scalar>
struct WignerFieldT {
  RingGrid grid;
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;  // rows() x n_theta

  WignerFieldT() = default;
  explicit WignerFieldT(const RingGrid& g)
      : grid(g), values(Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(
                     g.rows(), g.n_theta)) {}
};

using WignerField = WignerFieldT<double>;

// trace = dp * sum_n integral dtheta W(p_n, theta).
template <typename Scalar>
Scalar trace(const WignerFieldT<Scalar>& w) {
  return w.values.sum() * w.grid.dp() * w.grid.dtheta();
}

// Central momentum difference (f(p_{n+1}) - f(p_{n-1})) / hbar with a hard
// wall: rows beyond |n_max| read as zero.
template <typename Scalar>
WignerFieldT<Scalar> delta_p(const WignerFieldT<Scalar>& w) {
  const int r = w.grid.rows();
  WignerFieldT<Scalar> out(w.grid);
  out.values.topRows(r - 1) = w.values.bottomRows(r - 1);
  out.values.bottomRows(r - 1) -= w.values.topRows(r - 1);
  out.values /= Scalar(kHbar);
  return out;
}

// Second-order central angular derivative with periodic wrap.
template <typename Scalar>
WignerFieldT<Scalar> dtheta_deriv(const WignerFieldT<Scalar>& w) {
  const int c = w.grid.n_theta;
  WignerFieldT<Scalar> out(w.grid);
  const Scalar inv = Scalar(1) / Scalar(2.0 * w.grid.dtheta());
  for (int j = 0; j < c; ++j) {
    const int jp = (j + 1) % c;
    const int jm = (j + c - 1) % c;
    out.values.col(j) = (w.values.col(jp) - w.values.col(jm)) * inv;
  }
  return out;
}

}  // namespace ringheom
