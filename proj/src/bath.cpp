#include "ringheom/bath.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ringheom {

void BathSpec::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("BathSpec: eta must be finite and >= 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("BathSpec: gamma must be finite and > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("BathSpec: beta must be finite and > 0");
  }
}

double drude_sdf(const BathSpec& spec, double omega) {
  spec.validate();
  const double g2 = spec.gamma * spec.gamma;
  return spec.eta / M_PI * g2 * omega / (g2 + omega * omega);
}

namespace {

// Eigenvalues of the symmetric tridiagonal matrix with zero diagonal and
// off-diagonal b_m = 1/sqrt((2m + shift)(2m + shift + 2)), m = 1..n.
Eigen::ArrayXd secular_roots(int n, int shift) {
  if (n == 0) return Eigen::ArrayXd(0);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd sub(n);
  for (int m = 1; m <= n; ++m) {
    sub[m - 1] = 1.0 / std::sqrt(double(2 * m + shift) * double(2 * m + shift + 2));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending, symmetric about 0
  // Keep the strictly positive half, map lambda -> 2/lambda, sort ascending.
  Eigen::ArrayXd roots((n + 1) / 2);
  int out = 0;
  for (int i = n; i >= 0 && out < roots.size(); --i) {
    if (ev[i] > 0.0) roots[out++] = 2.0 / ev[i];
  }
  if (out != roots.size()) throw std::runtime_error("pade_decompose: eigenvalue sign split failed");
  return roots;
}

}  // namespace

PadeDecomposition pade_decompose(double beta, int K) {
  if (!(beta > 0.0)) throw std::invalid_argument("pade_decompose: beta must be > 0");
  if (K < 0) throw std::invalid_argument("pade_decompose: K must be >= 0");
  PadeDecomposition out;
  out.K = K;
  out.nu = Eigen::ArrayXd(K);
  out.etabar = Eigen::ArrayXd(K);
  if (K == 0) return out;

  // xi_j: poles of the [K-1/K] spectrum decomposition of the Bose function,
  // in the dimensionless variable x = beta*omega. zeta_k: companion roots
  // entering the weight products.
  const Eigen::ArrayXd xi = secular_roots(2 * K - 1, 1);    // size K, ascending
  const Eigen::ArrayXd zeta = secular_roots(2 * K - 2, 3);  // size K-1, ascending

  for (int j = 0; j < K; ++j) {
    const double xj2 = xi[j] * xi[j];
    double w = 0.5 * K * (2.0 * K + 3.0);
    // Pair numerator and denominator factors of similar magnitude to keep
    // the running product well scaled.
    for (int k = 0; k < K - 1; ++k) {
      const double zk2 = zeta[k] * zeta[k];
      const int kd = (k >= j) ? k + 1 : k;
      const double xk2 = xi[kd] * xi[kd];
      w *= (zk2 - xj2) / (xk2 - xj2);
    }
    out.etabar[j] = w;
    out.nu[j] = xi[j] / beta;
  }
  return out;
}

PadeDecomposition make_pade(const BathSpec& spec, int K) {
  spec.validate();
  PadeDecomposition pade = pade_decompose(spec.beta, K);
  const double g2 = spec.gamma * spec.gamma;
  double s = 0.0;
  for (int j = 0; j < K; ++j) {
    const double d = g2 - pade.nu[j] * pade.nu[j];
    if (d == 0.0) throw std::invalid_argument("make_pade: Pade pole coincides with gamma");
    s += 2.0 * pade.etabar[j] * g2 / d;
  }
  pade.c0 = spec.eta * spec.gamma / spec.beta * (1.0 + s);
  return pade;
}

std::complex<double> kernel(const BathSpec& spec, const PadeDecomposition& pade, double t) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("kernel: t must be >= 0");
  const double g = spec.gamma;
  const double g2 = g * g;
  const double eg = std::exp(-g * t);

  double s = 0.0;
  double tail = 0.0;
  for (int j = 0; j < pade.K; ++j) {
    const double nj = pade.nu[j];
    const double d = g2 - nj * nj;
    if (d == 0.0) throw std::invalid_argument("kernel: Pade pole coincides with gamma");
    s += 2.0 * pade.etabar[j] * g2 / d;
    tail += 2.0 * spec.eta * g2 / spec.beta * pade.etabar[j] * nj / d * std::exp(-nj * t);
  }
  const double re = spec.eta * g / spec.beta * (1.0 + s) * eg - tail;
  const double im = 0.5 * spec.eta * g2 * eg;
  return {re, im};
}

std::complex<double> matsubara_kernel(const BathSpec& spec, int M, double t) {
  spec.validate();
  if (M < 0) throw std::invalid_argument("matsubara_kernel: M must be >= 0");
  if (t < 0.0) throw std::invalid_argument("matsubara_kernel: t must be >= 0");
  const double g = spec.gamma;
  const double g2 = g * g;
  const double eg = std::exp(-g * t);

  double s = 0.0;
  double tail = 0.0;
  for (int k = 1; k <= M; ++k) {
    const double nk = 2.0 * M_PI * k / spec.beta;
    const double d = g2 - nk * nk;
    if (d == 0.0) throw std::invalid_argument("matsubara_kernel: Matsubara pole coincides with gamma");
    s += 2.0 * g2 / d;
    tail += 2.0 * spec.eta * g2 / spec.beta * nk / d * std::exp(-nk * t);
  }
  const double re = spec.eta * g / spec.beta * (1.0 + s) * eg - tail;
  const double im = 0.5 * spec.eta * g2 * eg;
  return {re, im};
}

}  // namespace ringheom
