#include "ringheom/dynamics_cl.hpp"

#include <cmath>
#include <string>

namespace ringheom {

CLGrid make_cl_grid(int n_p, double dp, int n_theta) {
  if (n_p < 8) throw std::invalid_argument("make_cl_grid: n_p must be at least 8");
  if (dp <= 0.0) throw std::invalid_argument("make_cl_grid: dp must be positive");
  if (n_theta < 4) throw std::invalid_argument("make_cl_grid: n_theta must be at least 4");
  return CLGrid{n_p, dp, n_theta};
}

double cl_trace(const CLField& w) { return w.values.sum() * w.grid.dp * w.grid.dtheta(); }

Eigen::ArrayXXd cl_dp_deriv(const Eigen::ArrayXXd& w, double dp) {
  const int r = static_cast<int>(w.rows());
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(r, w.cols());
  out.topRows(r - 1) = w.bottomRows(r - 1);
  out.bottomRows(r - 1) -= w.topRows(r - 1);
  out /= 2.0 * dp;
  return out;
}

Eigen::ArrayXXd cl_dtheta_deriv(const Eigen::ArrayXXd& w, double dtheta) {
  const int c = static_cast<int>(w.cols());
  Eigen::ArrayXXd out(w.rows(), c);
  const double inv = 1.0 / (2.0 * dtheta);
  for (int j = 0; j < c; ++j) {
    const int jp = (j + 1) % c;
    const int jm = (j + c - 1) % c;
    out.col(j) = (w.col(jp) - w.col(jm)) * inv;
  }
  return out;
}

CLStack::CLStack(std::shared_ptr<const HierarchySpace> sp, const CLGrid& g,
                 std::size_t budget_bytes)
    : grid(g), space(std::move(sp)) {
  const std::size_t bytes = std::size_t(space->size()) * points() * sizeof(double);
  if (bytes > budget_bytes) {
    throw std::length_error("CLStack: stack of " + std::to_string(bytes) +
                            " bytes exceeds the memory budget");
  }
  data = Eigen::ArrayXd::Zero(space->size() * points());
}

CLField CLStack::primary() const {
  CLField w(grid);
  w.values = field(0);
  return w;
}

namespace {

// out += coeff * central difference of src over the momentum rows
void add_dp(Eigen::Ref<Eigen::ArrayXXd> out, const Eigen::Ref<const Eigen::ArrayXXd>& src,
            double coeff, double dp) {
  const int r = static_cast<int>(out.rows());
  const double c = coeff / (2.0 * dp);
  out.topRows(r - 1) += c * src.bottomRows(r - 1);
  out.bottomRows(r - 1) -= c * src.topRows(r - 1);
}

}  // namespace

CLGenerator::CLGenerator(const RingParams& ring, const BathSpec& bath,
                         const PadeDecomposition& pade,
                         std::shared_ptr<const HierarchySpace> space, const CLGrid& grid,
                         bool terminator)
    : ring_(ring),
      bath_(bath),
      pade_(pade),
      space_(std::move(space)),
      grid_(grid),
      terminator_(terminator) {
  ring_.validate();
  bath_.validate();
  if (space_->n_slots() != pade_.K + 1) {
    throw std::invalid_argument(
        "CLGenerator: hierarchy slot count does not match the bath decomposition");
  }

  const double a = ring_.gauge_momentum();
  velocity_.resize(grid_.n_p);
  pa_.resize(grid_.n_p);
  for (int i = 0; i < grid_.n_p; ++i) {
    pa_[i] = grid_.p(i) - a;
    velocity_[i] = pa_[i] / ring_.inertia();
  }

  const double g = bath_.gamma;
  const double g2 = g * g;
  const int K1 = pade_.K + 1;
  nu_slot_.assign(K1, g);
  lower_diff_.assign(K1, 0.0);
  double s = 0.0;
  for (int j = 0; j < pade_.K; ++j) {
    const double nj = pade_.nu[j];
    const double d = g2 - nj * nj;
    if (d == 0.0) throw std::invalid_argument("CLGenerator: Pade pole coincides with gamma");
    nu_slot_[j + 1] = nj;
    s += 2.0 * pade_.etabar[j] * g2 / d;
    lower_diff_[j + 1] = -2.0 * bath_.eta * pade_.etabar[j] * g2 / (bath_.beta * d);
  }
  lower0_mult_ = bath_.eta * ring_.radius / ring_.inertia();
  lower0_diff_ = bath_.eta * ring_.radius * (1.0 + s) / bath_.beta;
  raise_coeff_ = ring_.radius;

  decay_.resize(space_->size());
  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const std::uint8_t* c = space_->counts(i);
    double d = 0.0;
    for (int k = 0; k < K1; ++k) d += c[k] * nu_slot_[k];
    decay_[i] = d;
  }
}

void CLGenerator::apply(const CLStack& in, CLStack& out) const {
  const int R = grid_.n_p;
  const int C = grid_.n_theta;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  const int K1 = space_->n_slots();
  const int N = space_->n_trunc();
  Eigen::ArrayXXd acc(R, C);
  Eigen::ArrayXXd tmp(R, C);

  for (std::int64_t i = 0; i < space_->size(); ++i) {
    const auto wi = in.field(i);
    auto oi = out.field(i);
    const std::uint8_t* cnt = space_->counts(i);
    const bool has_raise = space_->level(i) < N;
    const double dec = decay_[i];

    for (int j = 0; j < C; ++j) {
      const int jp = (j + 1 == C) ? 0 : j + 1;
      const int jm = (j == 0) ? C - 1 : j - 1;
      oi.col(j) = -velocity_ * (wi.col(jp) - wi.col(jm)) * inv2dth - dec * wi.col(j);
    }
    if (has_raise) {
      acc = in.field(space_->raised(i, 0));
      for (int k = 1; k < K1; ++k) acc += in.field(space_->raised(i, k));
      add_dp(oi, acc, raise_coeff_, grid_.dp);
    }
    for (int k = 0; k < K1; ++k) {
      const int n_k = cnt[k];
      if (n_k == 0) continue;
      const auto low = in.field(space_->lowered(i, k));
      const double base = n_k * nu_slot_[k];
      if (k == 0) {
        oi += (base * lower0_mult_) * (low.colwise() * pa_);
        add_dp(oi, low, base * lower0_diff_, grid_.dp);
      } else {
        add_dp(oi, low, base * lower_diff_[k], grid_.dp);
      }
    }
    if (terminator_ && !has_raise) {
      for (int k = 0; k < K1; ++k) {
        const double c = raise_coeff_ * (cnt[k] + 1) * nu_slot_[k] / (dec + nu_slot_[k]);
        if (k == 0) {
          tmp = lower0_mult_ * (wi.colwise() * pa_) +
                lower0_diff_ * cl_dp_deriv(wi, grid_.dp);
        } else {
          tmp = lower_diff_[k] * cl_dp_deriv(wi, grid_.dp);
        }
        add_dp(oi, tmp, c, grid_.dp);
      }
    }
  }
}

CLStack cl_heom_rhs(const CLGenerator& gen, const CLStack& in) {
  CLStack out(in.space, in.grid);
  gen.apply(in, out);
  return out;
}

CLMarkovianGenerator::CLMarkovianGenerator(const RingParams& ring, const BathSpec& bath,
                                           const CLGrid& grid)
    : ring_(ring), bath_(bath), grid_(grid) {
  ring_.validate();
  bath_.validate();
  const double a = ring_.gauge_momentum();
  velocity_.resize(grid_.n_p);
  for (int i = 0; i < grid_.n_p; ++i) velocity_[i] = (grid_.p(i) - a) / ring_.inertia();
  rate_ = bath_.eta / ring_.mass;
  diffusion_ = ring_.inertia() / bath_.beta;
  pa_face_.resize(grid_.n_p - 1);
  a0_face_.resize(grid_.n_p - 1);
  for (int i = 0; i + 1 < grid_.n_p; ++i) {
    pa_face_[i] = grid_.p(i) + 0.5 * grid_.dp - a;
    const double x = pa_face_[i] * grid_.dp / diffusion_;
    // 1/x - 1/(e^x - 1), series near zero; makes exp(-x) the zero-flux ratio
    a0_face_[i] = std::abs(x) < 1e-3 ? 0.5 - x / 12.0 + x * x * x / 720.0
                                     : 1.0 / x - 1.0 / std::expm1(x);
  }
}

void CLMarkovianGenerator::apply(const CLField& in, CLField& out) const {
  const int R = grid_.n_p;
  const int C = grid_.n_theta;
  const double inv2dth = 1.0 / (2.0 * grid_.dtheta());
  if (out.values.rows() != R || out.values.cols() != C) out.values.resize(R, C);
  Eigen::ArrayXd flux(R - 1);

  for (int j = 0; j < C; ++j) {
    const int jp = (j + 1 == C) ? 0 : j + 1;
    const int jm = (j == 0) ? C - 1 : j - 1;
    auto ocol = out.values.col(j);
    const auto icol = in.values.col(j);
    ocol = -velocity_ * (in.values.col(jp) - in.values.col(jm)) * inv2dth;
    flux = pa_face_ * (a0_face_ * icol.head(R - 1) + (1.0 - a0_face_) * icol.tail(R - 1)) +
           (diffusion_ / grid_.dp) * (icol.tail(R - 1) - icol.head(R - 1));
    ocol.head(R - 1) += (rate_ / grid_.dp) * flux;
    ocol.tail(R - 1) -= (rate_ / grid_.dp) * flux;
  }
}

CLField cl_markovian_rhs(const CLMarkovianGenerator& gen, const CLField& in) {
  CLField out(in.grid);
  gen.apply(in, out);
  return out;
}

CLField cl_gaussian_field(const CLGrid& grid, const RingParams& ring, double beta) {
  ring.validate();
  if (beta <= 0.0) throw std::invalid_argument("cl_gaussian_field: beta must be positive");
  CLField w(grid);
  const double a = ring.gauge_momentum();
  const double is2 = 2.0 * ring.inertia();
  for (int i = 0; i < grid.n_p; ++i) {
    const double d = grid.p(i) - a;
    w.values.row(i).setConstant(std::exp(-beta * d * d / is2));
  }
  w.values /= cl_trace(w);
  return w;
}

CLStack cl_gaussian_stack(std::shared_ptr<const HierarchySpace> space, const CLGrid& grid,
                          const RingParams& ring, double beta) {
  CLStack stack(std::move(space), grid);
  stack.field(0) = cl_gaussian_field(grid, ring, beta).values;
  return stack;
}

}  // namespace ringheom
