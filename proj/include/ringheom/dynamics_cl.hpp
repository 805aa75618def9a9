#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ringheom/bath.hpp"
#include "ringheom/dynamics_risb.hpp"
#include "ringheom/grid.hpp"
#include "ringheom/hierarchy.hpp"

namespace ringheom {

// Continuous momentum grid for the position-coupled reference model:
// p_i = (i - (n_p - 1)/2) dp, symmetric about zero, theta periodic.
struct CLGrid {
  int n_p = 128;
  double dp = 0.25;
  int n_theta = 64;

  double p(int i) const { return (i - 0.5 * (n_p - 1)) * dp; }
  double dtheta() const { return 2.0 * M_PI / n_theta; }
  double theta(int j) const { return dtheta() * j; }

  bool operator==(const CLGrid&) const = default;
};

CLGrid make_cl_grid(int n_p, double dp, int n_theta);

struct CLField {
  CLGrid grid;
  Eigen::ArrayXXd values;  // n_p x n_theta

  CLField() = default;
  explicit CLField(const CLGrid& g)
      : grid(g), values(Eigen::ArrayXXd::Zero(g.n_p, g.n_theta)) {}
};

double cl_trace(const CLField& w);

// Zero-padded central momentum derivative and periodic angular derivative.
Eigen::ArrayXXd cl_dp_deriv(const Eigen::ArrayXXd& w, double dp);
Eigen::ArrayXXd cl_dtheta_deriv(const Eigen::ArrayXXd& w, double dtheta);

// Single-bath hierarchy of CL fields, flat field-major storage.
struct CLStack {
  CLGrid grid;
  std::shared_ptr<const HierarchySpace> space;
  Eigen::ArrayXd data;

  CLStack() = default;
  CLStack(std::shared_ptr<const HierarchySpace> sp, const CLGrid& g,
          std::size_t budget_bytes = kDefaultStackBudget);

  std::int64_t points() const { return std::int64_t(grid.n_p) * grid.n_theta; }
  Eigen::Map<Eigen::ArrayXXd> field(std::int64_t i) {
    return {data.data() + i * points(), grid.n_p, grid.n_theta};
  }
  Eigen::Map<const Eigen::ArrayXXd> field(std::int64_t i) const {
    return {data.data() + i * points(), grid.n_p, grid.n_theta};
  }
  CLField primary() const;
};

// Hierarchy generator for the position-coupled model. For index n over one
// bath (slots k = 0..K, nu_0 = gamma):
//
//   dW_n/dt = -[(p - a)/I_S d_theta + sum_k n_k nu_k] W_n
//           + r0 dp[ sum_k W_{n + e_k} ]
//           + sum_k n_k nu_k Theta_k W_{n - e_k}
//
//   Theta_0 = (eta r0 / I_S) [(p - a) + (I_S / beta)(1 + S) d/dp]
//   Theta_k = -2 eta etabar_k gamma^2 / (beta (gamma^2 - nu_k^2)) d/dp
//
// with a the gauge momentum and S = sum_j 2 etabar_j gamma^2 / (gamma^2 - nu_j^2).
// Indices at the truncation level optionally close with the quasi-static
// value of each missing raised neighbor, obtained from that neighbor's own
// equation keeping only its damping and the feed from the current index:
//
//   W_{n + e_k} ~= (n_k + 1) nu_k Theta_k W_n / (sum_j n_j nu_j + nu_k)
//
// which at n = 0, K = 0 reduces the closed equation to the Markovian limit.
class CLGenerator {
 public:
  CLGenerator(const RingParams& ring, const BathSpec& bath, const PadeDecomposition& pade,
              std::shared_ptr<const HierarchySpace> space, const CLGrid& grid,
              bool terminator = true);

  void apply(const CLStack& in, CLStack& out) const;

  template <typename F>
  void for_each_term(F&& f) const;

  const RingParams& ring() const { return ring_; }
  const CLGrid& grid() const { return grid_; }
  const HierarchySpace& space() const { return *space_; }
  std::shared_ptr<const HierarchySpace> space_ptr() const { return space_; }
  bool terminator() const { return terminator_; }
  std::int64_t dimension() const { return space_->size() * std::int64_t(grid_.n_p) * grid_.n_theta; }

 private:
  RingParams ring_;
  BathSpec bath_;
  PadeDecomposition pade_;
  std::shared_ptr<const HierarchySpace> space_;
  CLGrid grid_;
  bool terminator_;

  Eigen::ArrayXd velocity_;          // (p_i - a) / I_S
  Eigen::ArrayXd pa_;                // p_i - a
  std::vector<double> nu_slot_;      // gamma, nu_1..nu_K
  double lower0_mult_;               // eta r0 / I_S
  double lower0_diff_;               // eta r0 (1 + S) / beta
  std::vector<double> lower_diff_;   // per-slot d/dp weight of Theta_k (k >= 1)
  double raise_coeff_;               // r0
  std::vector<double> decay_;
};

CLStack cl_heom_rhs(const CLGenerator& gen, const CLStack& in);

// Markovian limit: -[(p - a)/I_S] d_theta W + (eta/m_S) d_p[(p - a) + (I_S/beta) d_p] W.
// The dissipator is discretized in flux form with exponentially fitted face
// weights (Chang-Cooper), so trace is conserved exactly and the zero-flux
// steady state samples the continuum Gaussian exactly.
class CLMarkovianGenerator {
 public:
  CLMarkovianGenerator(const RingParams& ring, const BathSpec& bath, const CLGrid& grid);

  void apply(const CLField& in, CLField& out) const;

  template <typename F>
  void for_each_term(F&& f) const;

  const CLGrid& grid() const { return grid_; }
  const RingParams& ring() const { return ring_; }
  std::int64_t dimension() const { return std::int64_t(grid_.n_p) * grid_.n_theta; }

 private:
  RingParams ring_;
  BathSpec bath_;
  CLGrid grid_;
  Eigen::ArrayXd velocity_;
  Eigen::ArrayXd pa_face_;  // p_{i+1/2} - a, size n_p - 1
  Eigen::ArrayXd a0_face_;  // downwind face weight, 1/x - 1/(e^x - 1), x = pa dp / D
  double rate_;             // eta / m_S
  double diffusion_;        // I_S / beta
};

CLField cl_markovian_rhs(const CLMarkovianGenerator& gen, const CLField& in);

// theta-uniform Gaussian with mean a and variance I_S / beta, unit trace.
CLField cl_gaussian_field(const CLGrid& grid, const RingParams& ring, double beta);

CLStack cl_gaussian_stack(std::shared_ptr<const HierarchySpace> space, const CLGrid& grid,
                          const RingParams& ring, double beta);

// ---------------------------------------------------------------------------
// implementation

template <typename F>
void CLGenerator::for_each_term(F&& f) const {
  const int R = grid_.n_p;
  const int C = grid_.n_theta;
  const std::int64_t pts = std::int64_t(R) * C;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  const double inv2dp = 1.0 / (2.0 * grid_.dp);
  const int K1 = space_->n_slots();
  const int N = space_->n_trunc();
  const auto gi = [&](std::int64_t field, int r, int j) {
    return field * pts + std::int64_t(j) * R + r;
  };
  // emits coeff * (d/dp X)(r) for the stencil of X described elementwise by
  // emit_x(source_row, weight_into_x)
  const auto emit_dp = [&](auto&& emit_x, std::int64_t row, int r, double coeff) {
    if (r + 1 < R) emit_x(row, r + 1, coeff * inv2dp);
    if (r - 1 >= 0) emit_x(row, r - 1, -coeff * inv2dp);
  };

  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const std::uint8_t* cnt = space_->counts(i);
    const bool has_raise = space_->level(i) < N;
    const bool closes = terminator_ && !has_raise;
    for (int j = 0; j < C; ++j) {
      const int jp = (j + 1 == C) ? 0 : j + 1;
      const int jm = (j == 0) ? C - 1 : j - 1;
      for (int r = 0; r < R; ++r) {
        const std::int64_t row = gi(i, r, j);
        f(row, gi(i, r, jp), -velocity_[r] * inv2dth);
        f(row, gi(i, r, jm), velocity_[r] * inv2dth);
        if (decay_[i] != 0.0) f(row, gi(i, r, j), -decay_[i]);
        if (has_raise) {
          for (int k = 0; k < K1; ++k) {
            const std::int64_t tgt = space_->raised(i, k);
            emit_dp([&](std::int64_t rr, int s, double w) { f(rr, gi(tgt, s, j), w); }, row, r,
                    raise_coeff_);
          }
        }
        for (int k = 0; k < K1; ++k) {
          const int n_k = cnt[k];
          if (n_k == 0) continue;
          const std::int64_t tgt = space_->lowered(i, k);
          const double base = n_k * nu_slot_[k];
          if (k == 0) {
            f(row, gi(tgt, r, j), base * lower0_mult_ * pa_[r]);
            emit_dp([&](std::int64_t rr, int s, double w) { f(rr, gi(tgt, s, j), w); }, row, r,
                    base * lower0_diff_);
          } else {
            emit_dp([&](std::int64_t rr, int s, double w) { f(rr, gi(tgt, s, j), w); }, row, r,
                    base * lower_diff_[k]);
          }
        }
        if (closes) {
          for (int k = 0; k < K1; ++k) {
            const double c =
                raise_coeff_ * (cnt[k] + 1) * nu_slot_[k] / (decay_[i] + nu_slot_[k]);
            // d/dp of Theta_k W_n: compose the two stencils elementwise
            const auto inner = [&](std::int64_t rr, int s, double w) {
              if (k == 0) {
                f(rr, gi(i, s, j), w * lower0_mult_ * pa_[s]);
                if (s + 1 < R) f(rr, gi(i, s + 1, j), w * lower0_diff_ * inv2dp);
                if (s - 1 >= 0) f(rr, gi(i, s - 1, j), -w * lower0_diff_ * inv2dp);
              } else {
                if (s + 1 < R) f(rr, gi(i, s + 1, j), w * lower_diff_[k] * inv2dp);
                if (s - 1 >= 0) f(rr, gi(i, s - 1, j), -w * lower_diff_[k] * inv2dp);
              }
            };
            emit_dp(inner, row, r, c);
          }
        }
      }
    }
  }
}

template <typename F>
void CLMarkovianGenerator::for_each_term(F&& f) const {
  const int R = grid_.n_p;
  const int C = grid_.n_theta;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  const double k = rate_ / grid_.dp;
  const double dinv = diffusion_ / grid_.dp;
  const auto gi = [&](int r, int j) { return std::int64_t(j) * R + r; };

  for (int j = 0; j < C; ++j) {
    const int jp = (j + 1 == C) ? 0 : j + 1;
    const int jm = (j == 0) ? C - 1 : j - 1;
    for (int r = 0; r < R; ++r) {
      const std::int64_t row = gi(r, j);
      f(row, gi(r, jp), -velocity_[r] * inv2dth);
      f(row, gi(r, jm), velocity_[r] * inv2dth);
      if (r + 1 < R) {  // face r+1/2
        f(row, gi(r + 1, j), k * (pa_face_[r] * (1.0 - a0_face_[r]) + dinv));
        f(row, gi(r, j), k * (pa_face_[r] * a0_face_[r] - dinv));
      }
      if (r - 1 >= 0) {  // face r-1/2
        f(row, gi(r - 1, j), k * (-pa_face_[r - 1] * a0_face_[r - 1] + dinv));
        f(row, gi(r, j), k * (-pa_face_[r - 1] * (1.0 - a0_face_[r - 1]) - dinv));
      }
    }
  }
}

}  // namespace ringheom
