#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ringheom {

// Natural units: hbar = 1 throughout the library.
inline constexpr double kHbar = 1.0;

struct BathSpec {
  double eta = 1e-3;   // coupling strength
  double gamma = 1.0;  // Drude cutoff frequency
  double beta = 2.5;   // inverse temperature

  void validate() const;
};

// Exponential decomposition of the bath correlation kernel beyond the
// gamma pole: poles nu_j (ascending) with weights etabar_j, obtained from
// the Pade spectrum decomposition of the Bose function. Once bound to a
// BathSpec, c0 = (eta*gamma/beta) * (1 + sum_j 2*etabar_j*gamma^2 / (gamma^2 - nu_j^2)),
// the coefficient of the slot-0 momentum-derivative dissipator.
struct PadeDecomposition {
  int K = 0;
  Eigen::ArrayXd nu;
  Eigen::ArrayXd etabar;
  double c0 = 0.0;
};

// Drude spectral density J(omega) = (eta/pi) * gamma^2 * omega / (gamma^2 + omega^2).
double drude_sdf(const BathSpec& spec, double omega);

// Poles and weights only; c0 is left unset (zero).
PadeDecomposition pade_decompose(double beta, int K);

// pade_decompose bound to a spec: fills c0.
PadeDecomposition make_pade(const BathSpec& spec, int K);

// Two-time correlation kernel of the bath at time t >= 0,
//   L(t) = i*(eta*gamma^2/2) e^{-gamma t}
//        + (eta*gamma/beta) (1 + sum_j 2*etabar_j*gamma^2/(gamma^2 - nu_j^2)) e^{-gamma t}
//        - sum_j (2*eta*gamma^2/beta) * etabar_j*nu_j/(gamma^2 - nu_j^2) e^{-nu_j t}.
std::complex<double> kernel(const BathSpec& spec, const PadeDecomposition& pade, double t);

// Reference evaluation of the same kernel with M exact Matsubara poles
// nu_k = 2 pi k / beta (unit weights). Used as the arbiter for the Pade form.
std::complex<double> matsubara_kernel(const BathSpec& spec, int M, double t);

}  // namespace ringheom
