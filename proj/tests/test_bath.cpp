#include "ringheom/bath.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

using namespace ringheom;

TEST_CASE("drude_sdf values and symmetry") {
  BathSpec spec{0.01, 1.0, 0.2};
  CHECK(drude_sdf(spec, 0.0) == 0.0);
  // J(gamma) = eta*gamma / (2 pi)
  CHECK(drude_sdf(spec, 1.0) == doctest::Approx(0.01 / (2.0 * M_PI)).epsilon(1e-14));
  CHECK(drude_sdf(spec, 2.0) == doctest::Approx(0.01 / M_PI * 2.0 / 5.0).epsilon(1e-14));
  for (double w = 0.125; w < 40.0; w *= 2.0) {
    CHECK(drude_sdf(spec, w) > 0.0);
    CHECK(drude_sdf(spec, -w) == doctest::Approx(-drude_sdf(spec, w)).epsilon(1e-14));
  }
}

TEST_CASE("bath spec validation") {
  CHECK_THROWS_AS((BathSpec{-1.0, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((BathSpec{1.0, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((BathSpec{1.0, 1.0, -0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(pade_decompose(1.0, -1), std::invalid_argument);
}

TEST_CASE("pade_decompose K=0 and K=1 closed forms") {
  PadeDecomposition p0 = pade_decompose(1.0, 0);
  CHECK(p0.nu.size() == 0);
  CHECK(p0.etabar.size() == 0);

  // K=1: the one-pole decomposition of the Bose function has its pole at
  // x = 2*sqrt(15) (x = beta*omega) with weight 5/2. Independent route: the
  // pole is the root of 1 - x^2/15 obtained by truncating the continued
  // fraction of coth at depth one, scaled by the factor 2.
  PadeDecomposition p1 = pade_decompose(1.0, 1);
  REQUIRE(p1.nu.size() == 1);
  CHECK(p1.nu[0] == doctest::Approx(2.0 * std::sqrt(15.0)).epsilon(1e-13));
  CHECK(p1.etabar[0] == doctest::Approx(2.5).epsilon(1e-13));

  PadeDecomposition p1b = pade_decompose(0.2, 1);
  CHECK(p1b.nu[0] == doctest::Approx(2.0 * std::sqrt(15.0) / 0.2).epsilon(1e-13));
}

TEST_CASE("pade poles ascend and sit above the Matsubara ladder") {
  for (double beta : {0.2, 1.0, 2.5}) {
    PadeDecomposition p = pade_decompose(beta, 4);
    for (int j = 0; j < 4; ++j) {
      if (j > 0) CHECK(p.nu[j] > p.nu[j - 1]);
      CHECK(p.nu[j] > 2.0 * M_PI * (j + 1) / beta);
      CHECK(p.etabar[j] > 0.0);
    }
  }
}

TEST_CASE("decomposition reproduces coth at small argument") {
  // coth(x) = 1/x + sum_j 2*etabar_j*x/(x^2 + (xi_j/2)^2) for x well inside
  // the accurate band; at beta = 1 the stored nu_j equal xi_j.
  const double x = 0.3;
  for (int K : {1, 2, 4, 6}) {
    PadeDecomposition p = pade_decompose(1.0, K);
    double val = 1.0 / x;
    for (int j = 0; j < K; ++j) {
      const double half_xi = 0.5 * p.nu[j];
      val += 2.0 * p.etabar[j] * x / (x * x + half_xi * half_xi);
    }
    // Accuracy order grows with K: the K-pole form is exact through x^(4K-1).
    CHECK(val == doctest::Approx(1.0 / std::tanh(x)).epsilon(K == 1 ? 1e-6 : 1e-12));
  }
}

TEST_CASE("c0 binding") {
  BathSpec spec{0.01, 1.0, 0.2};
  PadeDecomposition p0 = make_pade(spec, 0);
  CHECK(p0.c0 == doctest::Approx(0.01 * 1.0 / 0.2).epsilon(1e-14));

  PadeDecomposition p1 = make_pade(spec, 1);
  const double nu = 2.0 * std::sqrt(15.0) / 0.2;
  const double expected = 0.01 / 0.2 * (1.0 + 2.0 * 2.5 / (1.0 - nu * nu));
  CHECK(p1.c0 == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("kernel imaginary part is the friction kernel, beta and K independent") {
  for (double beta : {0.2, 2.5}) {
    for (int K : {0, 1, 4}) {
      BathSpec spec{0.01, 1.0, beta};
      PadeDecomposition p = make_pade(spec, K);
      CHECK(kernel(spec, p, 0.0).imag() == doctest::Approx(0.005).epsilon(1e-14));
      CHECK(kernel(spec, p, 2.0).imag() ==
            doctest::Approx(0.005 * std::exp(-2.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernel matches the Matsubara oracle at moderate time") {
  BathSpec spec{0.01, 1.0, 0.2};
  PadeDecomposition p = make_pade(spec, 1);
  const double re = kernel(spec, p, 1.0).real();
  const double re_oracle = matsubara_kernel(spec, 200, 1.0).real();
  CHECK(std::abs(re - re_oracle) / std::abs(re_oracle) < 1e-3);
}

TEST_CASE("kernel decays to zero") {
  BathSpec spec{1.0, 1.0, 2.5};
  PadeDecomposition p = make_pade(spec, 4);
  CHECK(std::abs(kernel(spec, p, 60.0)) < 1e-20);
  CHECK(std::abs(matsubara_kernel(spec, 100, 60.0)) < 1e-20);
}

TEST_CASE("matsubara oracle Richardson self-consistency") {
  BathSpec spec{0.01, 1.0, 0.2};
  const double t = 0.5;
  const double v1 = matsubara_kernel(spec, 1000, t).real();
  const double v2 = matsubara_kernel(spec, 2000, t).real();
  const double v4 = matsubara_kernel(spec, 4000, t).real();
  const double d12 = std::abs(v2 - v1);
  const double d24 = std::abs(v4 - v2);
  // The gamma-pole coefficient converges like 1/M, so doubling M halves the gap.
  CHECK(d24 <= 0.6 * d12);
  CHECK(d12 < 1e-7);

  // Richardson extrapolation in 1/M recovers the closed form
  // (eta*gamma^2/2)*cot(beta*gamma/2)*exp(-gamma t); pole terms decay as
  // exp(-31.4 k t) and are below 1e-15 here.
  const double closed = 0.005 / std::tan(0.1) * std::exp(-0.5);
  CHECK(2.0 * v4 - v2 == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("kernel error against the oracle is non-increasing in K") {
  // Reference: Richardson-extrapolated Matsubara sum, so its own truncation
  // floor sits well below the K = 6 decomposition error everywhere probed.
  std::vector<double> ts;
  for (int i = 0; i <= 64; ++i) ts.push_back(i / 64.0);  // scaled by 5/gamma below
  for (double eta : {0.01, 1.0}) {
    for (double gamma : {0.5, 2.0}) {
      for (double beta : {0.2, 2.5}) {
        BathSpec spec{eta, gamma, beta};
        std::vector<std::complex<double>> oracle;
        for (double s : ts) {
          const double t = 5.0 / gamma * s;
          const auto a = matsubara_kernel(spec, 4000, t);
          const auto b = matsubara_kernel(spec, 8000, t);
          oracle.push_back(2.0 * b - a);
        }
        const double floor = 1e-9 * std::abs(oracle[0]);
        double prev = std::numeric_limits<double>::infinity();
        for (int K = 0; K <= 6; ++K) {
          PadeDecomposition p = make_pade(spec, K);
          double err = 0.0;
          for (std::size_t i = 0; i < ts.size(); ++i) {
            const double t = 5.0 / gamma * ts[i];
            err = std::max(err, std::abs(kernel(spec, p, t) - oracle[i]));
          }
          CHECK(err <= prev + floor);
          prev = err;
        }
      }
    }
  }
}
