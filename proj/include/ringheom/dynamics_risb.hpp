#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringheom/bath.hpp"
#include "ringheom/grid.hpp"
#include "ringheom/hierarchy.hpp"

namespace ringheom {

// Ring-angle potential sum_k (u^c_k cos k theta + u^s_k sin k theta),
// k = 1..k_max. Empty for the bare flux-threaded ring.
struct PotentialSpec {
  Eigen::ArrayXd cos_coeffs;
  Eigen::ArrayXd sin_coeffs;

  int k_max() const { return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size())); }
  bool empty() const { return k_max() == 0; }
  double uc(int k) const { return k <= cos_coeffs.size() ? cos_coeffs[k - 1] : 0.0; }
  double us(int k) const { return k <= sin_coeffs.size() ? sin_coeffs[k - 1] : 0.0; }
};

inline constexpr std::size_t kDefaultStackBudget = std::size_t(4500) * 1024 * 1024;

// One Wigner field per hierarchy index, stored contiguously field-major;
// within a field the layout matches WignerFieldT (momentum rows, angle
// columns, column-major).
template <typename Scalar>
struct AdoStackT {
  RingGrid grid;
  std::shared_ptr<const HierarchySpace> space;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> data;

  AdoStackT() = default;
  AdoStackT(std::shared_ptr<const HierarchySpace> sp, const RingGrid& g,
            std::size_t budget_bytes = kDefaultStackBudget)
      : grid(g), space(std::move(sp)) {
    const std::size_t bytes =
        std::size_t(space->size()) * points() * sizeof(Scalar);
    if (bytes > budget_bytes) {
      throw std::length_error("AdoStackT: stack of " + std::to_string(bytes) +
                              " bytes exceeds the memory budget");
    }
    data = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(space->size() * points());
  }

  std::int64_t points() const { return std::int64_t(grid.rows()) * grid.n_theta; }

  Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>> field(std::int64_t i) {
    return {data.data() + i * points(), grid.rows(), grid.n_theta};
  }
  Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>> field(
      std::int64_t i) const {
    return {data.data() + i * points(), grid.rows(), grid.n_theta};
  }

  WignerFieldT<Scalar> primary() const {
    WignerFieldT<Scalar> w(grid);
    w.values = field(0);
    return w;
  }
};

using AdoStack = AdoStackT<double>;

// d/dt of a single field under the bare ring Liouvillian (drift plus
// potential displacement terms).
WignerField liouvillian_apply(const WignerField& w, const RingParams& ring,
                              const PotentialSpec& pot);

// Rotationally invariant system-bath hierarchy generator. For hierarchy
// index n with per-slot counts n_k^alpha (alpha in {x, y}, k = 0..K):
//
//   dW_n/dt = -L W_n - (sum n_k^a nu_k) W_n
//           + sum_a f_a(theta) r0 dp[ sum_k W_{n + e_ak} ]
//           + sum_a f_a(theta) dp[ sum_k n_k^a c_k r0 W_{n - e_ak} ]
//           - (eta gamma^2 r0 / 2) sum_a n_0^a g_a(theta) [W_{n - e_a0}(p+1) + W_{n - e_a0}(p-1)]
//
// with f_x = -sin, g_x = cos, f_y = cos, g_y = sin, dp the hard-wall central
// momentum difference, c_0 = (eta gamma / beta)(1 + S),
// c_j = -(eta gamma^2 / beta) 2 etabar_j nu_j / (gamma^2 - nu_j^2), and
// missing raised neighbors read as zero.
template <typename Scalar>
class RisbGeneratorT {
 public:
  RisbGeneratorT(const RingParams& ring, const BathSpec& bath, const PadeDecomposition& pade,
                 const PotentialSpec& pot, std::shared_ptr<const HierarchySpace> space,
                 const RingGrid& grid);

  void apply(const AdoStackT<Scalar>& in, AdoStackT<Scalar>& out) const;

  // Emits every matrix element as f(row_global, col_global, coeff); the
  // linearization matches AdoStackT's flat layout.
  template <typename F>
  void for_each_term(F&& f) const;

  const RingParams& ring() const { return ring_; }
  const BathSpec& bath() const { return bath_; }
  const RingGrid& grid() const { return grid_; }
  const HierarchySpace& space() const { return *space_; }
  std::shared_ptr<const HierarchySpace> space_ptr() const { return space_; }
  std::int64_t dimension() const { return space_->size() * std::int64_t(grid_.rows()) * grid_.n_theta; }

 private:
  RingParams ring_;
  BathSpec bath_;
  PadeDecomposition pade_;
  PotentialSpec pot_;
  std::shared_ptr<const HierarchySpace> space_;
  RingGrid grid_;
  int slots_per_bath_;  // K + 1

  using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  ArrayX velocity_;                 // (p_n - a) / I_S per momentum row
  ArrayX f_theta_[2], g_theta_[2];  // coupling profiles per bath
  std::vector<double> nu_slot_;     // per slot within one bath, size K+1
  std::vector<double> lower_coeff_;  // c_k * r0, size K+1
  double raise_coeff_;               // r0
  double g_coeff_;                   // -eta gamma^2 r0 / 2
  std::vector<double> decay_;        // per hierarchy index
};

using RisbGenerator = RisbGeneratorT<double>;

AdoStack heom_rhs(const RisbGenerator& gen, const AdoStack& in);

// Markovian (high-temperature) limit with renormalized inverse temperature
// beta' = beta / (1 - beta hbar^2 / (2 I_S)); valid only while the
// denominator stays positive.
double beta_prime(const RingParams& ring, double beta);

template <typename Scalar>
class RisbMarkovianGeneratorT {
 public:
  RisbMarkovianGeneratorT(const RingParams& ring, const BathSpec& bath, const PotentialSpec& pot,
                          const RingGrid& grid);

  void apply(const WignerFieldT<Scalar>& in, WignerFieldT<Scalar>& out) const;

  template <typename F>
  void for_each_term(F&& f) const;

  const RingGrid& grid() const { return grid_; }
  const RingParams& ring() const { return ring_; }
  double beta_prime_value() const { return beta_prime_; }
  std::int64_t dimension() const { return std::int64_t(grid_.rows()) * grid_.n_theta; }

 private:
  RingParams ring_;
  BathSpec bath_;
  PotentialSpec pot_;
  RingGrid grid_;
  double beta_prime_;
  double diffusion_;  // eta r0^2 / (beta' hbar^2)
  double friction_;   // eta / (2 m hbar)
  Eigen::Array<Scalar, Eigen::Dynamic, 1> velocity_;
};

using RisbMarkovianGenerator = RisbMarkovianGeneratorT<double>;

WignerField markovian_rhs(const RisbMarkovianGenerator& gen, const WignerField& in);

// Gauge covariance shift: advancing the flux by k quanta maps each field to
// itself displaced by 2k momentum rows (rows pushed past the wall are lost,
// vacated rows read zero).
template <typename Scalar>
void flux_shift_field(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& in,
                      Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out, int k) {
  const int r = static_cast<int>(in.rows());
  const int shift = 2 * k;
  out.setZero(r, in.cols());
  if (std::abs(shift) >= r) return;
  if (shift >= 0) {
    out.bottomRows(r - shift) = in.topRows(r - shift);
  } else {
    out.topRows(r + shift) = in.bottomRows(r + shift);
  }
}

template <typename Scalar>
AdoStackT<Scalar> flux_shift(const AdoStackT<Scalar>& in, int k) {
  AdoStackT<Scalar> out(in.space, in.grid);
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> tmp;
  for (std::int64_t i = 0; i < in.space->size(); ++i) {
    tmp = in.field(i);
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> shifted;
    flux_shift_field(tmp, shifted, k);
    out.field(i) = shifted;
  }
  return out;
}

// theta-uniform Boltzmann weights exp(-beta (p_n - a)^2 / (2 I_S)) on the
// population rows (even n), normalized to unit trace; hierarchy fields zero.
AdoStack boltzmann_stack(std::shared_ptr<const HierarchySpace> space, const RingGrid& grid,
                         const RingParams& ring, double beta);

WignerField boltzmann_field(const RingGrid& grid, const RingParams& ring, double beta);

// ---------------------------------------------------------------------------
// implementation

namespace detail {

// Angle tables for the potential displacement term,
// row k-1: -(u^c_k sin k theta_j - u^s_k cos k theta_j) / hbar.
Eigen::ArrayXXd potential_table(const PotentialSpec& pot, const RingGrid& grid);

}  // namespace detail

template <typename Scalar>
RisbGeneratorT<Scalar>::RisbGeneratorT(const RingParams& ring, const BathSpec& bath,
                                       const PadeDecomposition& pade, const PotentialSpec& pot,
                                       std::shared_ptr<const HierarchySpace> space,
                                       const RingGrid& grid)
    : ring_(ring), bath_(bath), pade_(pade), pot_(pot), space_(std::move(space)), grid_(grid) {
  ring_.validate();
  bath_.validate();
  slots_per_bath_ = pade_.K + 1;
  if (space_->n_slots() != 2 * slots_per_bath_) {
    throw std::invalid_argument(
        "RisbGenerator: hierarchy slot count does not match the bath decomposition");
  }
  if (pot_.k_max() > grid_.n_max) {
    throw std::invalid_argument("RisbGenerator: potential harmonic exceeds the momentum grid");
  }

  const double a = ring_.gauge_momentum();
  const double inv_inertia = 1.0 / ring_.inertia();
  velocity_.resize(grid_.rows());
  for (int r = 0; r < grid_.rows(); ++r) {
    velocity_[r] = Scalar((grid_.p(r - grid_.n_max) - a) * inv_inertia);
  }
  for (int al = 0; al < 2; ++al) {
    f_theta_[al].resize(grid_.n_theta);
    g_theta_[al].resize(grid_.n_theta);
  }
  for (int j = 0; j < grid_.n_theta; ++j) {
    const double th = grid_.theta(j);
    f_theta_[0][j] = Scalar(-std::sin(th));
    g_theta_[0][j] = Scalar(std::cos(th));
    f_theta_[1][j] = Scalar(std::cos(th));
    g_theta_[1][j] = Scalar(std::sin(th));
  }

  const double g = bath_.gamma;
  const double g2 = g * g;
  nu_slot_.assign(slots_per_bath_, g);
  lower_coeff_.assign(slots_per_bath_, 0.0);
  double s = 0.0;
  for (int j = 0; j < pade_.K; ++j) {
    const double nj = pade_.nu[j];
    const double d = g2 - nj * nj;
    if (d == 0.0) throw std::invalid_argument("RisbGenerator: Pade pole coincides with gamma");
    nu_slot_[j + 1] = nj;
    s += 2.0 * pade_.etabar[j] * g2 / d;
    lower_coeff_[j + 1] = -bath_.eta * g2 / bath_.beta * 2.0 * pade_.etabar[j] * nj / d *
                          ring_.radius;
  }
  lower_coeff_[0] = bath_.eta * g / bath_.beta * (1.0 + s) * ring_.radius;
  raise_coeff_ = ring_.radius;
  g_coeff_ = -0.5 * bath_.eta * g2 * ring_.radius;

  decay_.resize(space_->size());
  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const std::uint8_t* c = space_->counts(i);
    double d = 0.0;
    for (int al = 0; al < 2; ++al) {
      for (int k = 0; k < slots_per_bath_; ++k) d += c[al * slots_per_bath_ + k] * nu_slot_[k];
    }
    decay_[i] = d;
  }
}

template <typename Scalar>
void RisbGeneratorT<Scalar>::apply(const AdoStackT<Scalar>& in, AdoStackT<Scalar>& out) const {
  const int R = grid_.rows();
  const int C = grid_.n_theta;
  const Scalar inv2dth = Scalar(1.0 / (2.0 * grid_.dtheta()));
  const Scalar invh = Scalar(1.0 / kHbar);
  const int K1 = slots_per_bath_;
  const int N = space_->n_trunc();
  const Eigen::ArrayXXd pot_tab = detail::potential_table(pot_, grid_);
  const int kmax = pot_.k_max();

  using Arr2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Arr2 rsum[2];
  Arr2 lsum[2];
  for (int al = 0; al < 2; ++al) {
    rsum[al].resize(R, C);
    lsum[al].resize(R, C);
  }

  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const auto wi = in.field(i);
    auto oi = out.field(i);
    const std::uint8_t* cnt = space_->counts(i);
    const bool has_raise = space_->level(i) < N;

    if (has_raise) {
      for (int al = 0; al < 2; ++al) {
        rsum[al] = in.field(space_->raised(i, al * K1));
        for (int k = 1; k < K1; ++k) rsum[al] += in.field(space_->raised(i, al * K1 + k));
      }
    }
    bool has_lower[2] = {false, false};
    const Scalar* g_src[2] = {nullptr, nullptr};
    Scalar g_weight[2] = {Scalar(0), Scalar(0)};
    for (int al = 0; al < 2; ++al) {
      for (int k = 0; k < K1; ++k) {
        const int n_k = cnt[al * K1 + k];
        if (n_k == 0) continue;
        const auto low = in.field(space_->lowered(i, al * K1 + k));
        const Scalar w = Scalar(n_k * lower_coeff_[k]);
        if (has_lower[al]) {
          lsum[al] += w * low;
        } else {
          lsum[al] = w * low;
          has_lower[al] = true;
        }
        if (k == 0) {
          g_src[al] = low.data();
          g_weight[al] = Scalar(n_k) * Scalar(g_coeff_);
        }
      }
    }

    const Scalar dec = Scalar(decay_[i]);
    for (int j = 0; j < C; ++j) {
      const int jp = (j + 1 == C) ? 0 : j + 1;
      const int jm = (j == 0) ? C - 1 : j - 1;
      auto ocol = oi.col(j);
      ocol = -velocity_ * (wi.col(jp) - wi.col(jm)) * inv2dth - dec * wi.col(j);
      for (int k = 1; k <= kmax; ++k) {
        const Scalar c = Scalar(pot_tab(k - 1, j));
        if (c == Scalar(0)) continue;
        ocol.head(R - k) += c * wi.col(j).tail(R - k);
        ocol.tail(R - k) -= c * wi.col(j).head(R - k);
      }
      for (int al = 0; al < 2; ++al) {
        if (has_raise) {
          const Scalar c = Scalar(raise_coeff_) * f_theta_[al][j] * invh;
          ocol.head(R - 1) += c * rsum[al].col(j).tail(R - 1);
          ocol.tail(R - 1) -= c * rsum[al].col(j).head(R - 1);
        }
        if (has_lower[al]) {
          const Scalar c = f_theta_[al][j] * invh;
          ocol.head(R - 1) += c * lsum[al].col(j).tail(R - 1);
          ocol.tail(R - 1) -= c * lsum[al].col(j).head(R - 1);
        }
        if (g_src[al] != nullptr) {
          const Scalar c = g_weight[al] * g_theta_[al][j];
          Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>> gc(g_src[al] + std::int64_t(j) * R, R);
          ocol.head(R - 1) += c * gc.tail(R - 1);
          ocol.tail(R - 1) += c * gc.head(R - 1);
        }
      }
    }
  }
}

template <typename Scalar>
template <typename F>
void RisbGeneratorT<Scalar>::for_each_term(F&& f) const {
  const int R = grid_.rows();
  const int C = grid_.n_theta;
  const std::int64_t pts = std::int64_t(R) * C;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  const double invh = 1.0 / kHbar;
  const int K1 = slots_per_bath_;
  const int N = space_->n_trunc();
  const Eigen::ArrayXXd pot_tab = detail::potential_table(pot_, grid_);
  const int kmax = pot_.k_max();
  const auto gi = [&](std::int64_t field, int r, int j) {
    return field * pts + std::int64_t(j) * R + r;
  };

  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const std::uint8_t* cnt = space_->counts(i);
    const bool has_raise = space_->level(i) < N;
    for (int j = 0; j < C; ++j) {
      const int jp = (j + 1 == C) ? 0 : j + 1;
      const int jm = (j == 0) ? C - 1 : j - 1;
      for (int r = 0; r < R; ++r) {
        const std::int64_t row = gi(i, r, j);
        f(row, gi(i, r, jp), -double(velocity_[r]) * inv2dth);
        f(row, gi(i, r, jm), double(velocity_[r]) * inv2dth);
        if (decay_[i] != 0.0) f(row, gi(i, r, j), -decay_[i]);
        for (int k = 1; k <= kmax; ++k) {
          const double c = pot_tab(k - 1, j);
          if (c == 0.0) continue;
          if (r + k < R) f(row, gi(i, r + k, j), c);
          if (r - k >= 0) f(row, gi(i, r - k, j), -c);
        }
        for (int al = 0; al < 2; ++al) {
          if (has_raise) {
            const double c = raise_coeff_ * double(f_theta_[al][j]) * invh;
            for (int k = 0; k < K1; ++k) {
              const std::int64_t tgt = space_->raised(i, al * K1 + k);
              if (r + 1 < R) f(row, gi(tgt, r + 1, j), c);
              if (r - 1 >= 0) f(row, gi(tgt, r - 1, j), -c);
            }
          }
          for (int k = 0; k < K1; ++k) {
            const int n_k = cnt[al * K1 + k];
            if (n_k == 0) continue;
            const std::int64_t tgt = space_->lowered(i, al * K1 + k);
            const double c = n_k * lower_coeff_[k] * double(f_theta_[al][j]) * invh;
            if (r + 1 < R) f(row, gi(tgt, r + 1, j), c);
            if (r - 1 >= 0) f(row, gi(tgt, r - 1, j), -c);
            if (k == 0) {
              const double cg = n_k * g_coeff_ * double(g_theta_[al][j]);
              if (r + 1 < R) f(row, gi(tgt, r + 1, j), cg);
              if (r - 1 >= 0) f(row, gi(tgt, r - 1, j), cg);
            }
          }
        }
      }
    }
  }
}

template <typename Scalar>
RisbMarkovianGeneratorT<Scalar>::RisbMarkovianGeneratorT(const RingParams& ring,
                                                         const BathSpec& bath,
                                                         const PotentialSpec& pot,
                                                         const RingGrid& grid)
    : ring_(ring), bath_(bath), pot_(pot), grid_(grid) {
  ring_.validate();
  bath_.validate();
  if (pot_.k_max() > grid_.n_max) {
    throw std::invalid_argument(
        "RisbMarkovianGenerator: potential harmonic exceeds the momentum grid");
  }
  beta_prime_ = beta_prime(ring_, bath_.beta);
  const double r02 = ring_.radius * ring_.radius;
  diffusion_ = bath_.eta * r02 / (beta_prime_ * kHbar * kHbar);
  friction_ = bath_.eta / (2.0 * ring_.mass * kHbar);
  const double a = ring_.gauge_momentum();
  velocity_.resize(grid_.rows());
  for (int r = 0; r < grid_.rows(); ++r) {
    velocity_[r] = Scalar((grid_.p(r - grid_.n_max) - a) / ring_.inertia());
  }
}

template <typename Scalar>
void RisbMarkovianGeneratorT<Scalar>::apply(const WignerFieldT<Scalar>& in,
                                            WignerFieldT<Scalar>& out) const {
  const int R = grid_.rows();
  const int C = grid_.n_theta;
  const Scalar inv2dth = Scalar(1.0 / (2.0 * grid_.dtheta()));
  const Eigen::ArrayXXd pot_tab = detail::potential_table(pot_, grid_);
  const int kmax = pot_.k_max();
  const Scalar Is = Scalar(ring_.inertia());
  if (out.values.rows() != R || out.values.cols() != C) out.values.resize(R, C);

  // (p_r - a) profile reused by the friction shift.
  Eigen::Array<Scalar, Eigen::Dynamic, 1> pa = velocity_ * Is;
  for (int j = 0; j < C; ++j) {
    const int jp = (j + 1 == C) ? 0 : j + 1;
    const int jm = (j == 0) ? C - 1 : j - 1;
    auto ocol = out.values.col(j);
    const auto icol = in.values.col(j);
    ocol = -velocity_ * (in.values.col(jp) - in.values.col(jm)) * inv2dth -
           Scalar(2.0 * diffusion_) * icol;
    for (int k = 1; k <= kmax; ++k) {
      const Scalar c = Scalar(pot_tab(k - 1, j));
      if (c == Scalar(0)) continue;
      ocol.head(R - k) += c * icol.tail(R - k);
      ocol.tail(R - k) -= c * icol.head(R - k);
    }
    ocol.head(R - 2) += Scalar(diffusion_) * icol.tail(R - 2) +
                        Scalar(friction_) * pa.tail(R - 2) * icol.tail(R - 2);
    ocol.tail(R - 2) += Scalar(diffusion_) * icol.head(R - 2) -
                        Scalar(friction_) * pa.head(R - 2) * icol.head(R - 2);
  }
}

template <typename Scalar>
template <typename F>
void RisbMarkovianGeneratorT<Scalar>::for_each_term(F&& f) const {
  const int R = grid_.rows();
  const int C = grid_.n_theta;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  const Eigen::ArrayXXd pot_tab = detail::potential_table(pot_, grid_);
  const int kmax = pot_.k_max();
  const auto gi = [&](int r, int j) { return std::int64_t(j) * R + r; };
  const double Is = ring_.inertia();

  for (int j = 0; j < C; ++j) {
    const int jp = (j + 1 == C) ? 0 : j + 1;
    const int jm = (j == 0) ? C - 1 : j - 1;
    for (int r = 0; r < R; ++r) {
      const std::int64_t row = gi(r, j);
      f(row, gi(r, jp), -double(velocity_[r]) * inv2dth);
      f(row, gi(r, jm), double(velocity_[r]) * inv2dth);
      f(row, gi(r, j), -2.0 * diffusion_);
      for (int k = 1; k <= kmax; ++k) {
        const double c = pot_tab(k - 1, j);
        if (c == 0.0) continue;
        if (r + k < R) f(row, gi(r + k, j), c);
        if (r - k >= 0) f(row, gi(r - k, j), -c);
      }
      if (r + 2 < R) {
        f(row, gi(r + 2, j), diffusion_ + friction_ * double(velocity_[r + 2]) * Is);
      }
      if (r - 2 >= 0) {
        f(row, gi(r - 2, j), diffusion_ - friction_ * double(velocity_[r - 2]) * Is);
      }
    }
  }
}

}  // namespace ringheom
