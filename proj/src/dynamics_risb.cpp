#include "ringheom/dynamics_risb.hpp"

#include <cmath>

namespace ringheom {

namespace detail {

Eigen::ArrayXXd potential_table(const PotentialSpec& pot, const RingGrid& grid) {
  const int kmax = pot.k_max();
  Eigen::ArrayXXd tab(kmax, grid.n_theta);
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 0; j < grid.n_theta; ++j) {
      const double th = grid.theta(j);
      tab(k - 1, j) =
          -(pot.uc(k) * std::sin(k * th) - pot.us(k) * std::cos(k * th)) / kHbar;
    }
  }
  return tab;
}

}  // namespace detail

WignerField liouvillian_apply(const WignerField& w, const RingParams& ring,
                              const PotentialSpec& pot) {
  ring.validate();
  const RingGrid& grid = w.grid;
  if (pot.k_max() > grid.n_max) {
    throw std::invalid_argument("liouvillian_apply: potential harmonic exceeds the momentum grid");
  }
  const int R = grid.rows();
  const double a = ring.gauge_momentum();
  Eigen::ArrayXd velocity(R);
  for (int r = 0; r < R; ++r) velocity[r] = (grid.p(r - grid.n_max) - a) / ring.inertia();

  WignerField out(grid);
  out.values = dtheta_deriv(w).values.colwise() * (-velocity);

  const Eigen::ArrayXXd tab = detail::potential_table(pot, grid);
  for (int k = 1; k <= pot.k_max(); ++k) {
    for (int j = 0; j < grid.n_theta; ++j) {
      const double c = tab(k - 1, j);
      if (c == 0.0) continue;
      out.values.col(j).head(R - k) += c * w.values.col(j).tail(R - k);
      out.values.col(j).tail(R - k) -= c * w.values.col(j).head(R - k);
    }
  }
  return out;
}

AdoStack heom_rhs(const RisbGenerator& gen, const AdoStack& in) {
  AdoStack out(in.space, in.grid);
  gen.apply(in, out);
  return out;
}

double beta_prime(const RingParams& ring, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("beta_prime: beta must be positive");
  const double denom = 1.0 - beta * kHbar * kHbar / (2.0 * ring.inertia());
  if (denom <= 0.0) {
    throw std::domain_error("beta_prime: high-temperature form invalid, beta hbar^2 >= 2 I_S");
  }
  return beta / denom;
}

WignerField markovian_rhs(const RisbMarkovianGenerator& gen, const WignerField& in) {
  WignerField out(in.grid);
  gen.apply(in, out);
  return out;
}

WignerField boltzmann_field(const RingGrid& grid, const RingParams& ring, double beta) {
  ring.validate();
  if (beta <= 0.0) throw std::invalid_argument("boltzmann_field: beta must be positive");
  WignerField w(grid);
  const double a = ring.gauge_momentum();
  const double is2 = 2.0 * ring.inertia();
  for (int n = -grid.n_max; n <= grid.n_max; ++n) {
    if (n % 2 != 0) continue;  // odd rows are coherences, zero at equilibrium
    const double d = grid.p(n) - a;
    w.values.row(grid.row(n)).setConstant(std::exp(-beta * d * d / is2));
  }
  w.values /= trace(w);
  return w;
}

AdoStack boltzmann_stack(std::shared_ptr<const HierarchySpace> space, const RingGrid& grid,
                         const RingParams& ring, double beta) {
  AdoStack stack(std::move(space), grid);
  stack.field(0) = boltzmann_field(grid, ring, beta).values;
  return stack;
}

}  // namespace ringheom
