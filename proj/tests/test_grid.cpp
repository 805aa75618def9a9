#include "ringheom/grid.hpp"

#include <cmath>

#include "doctest.h"

using namespace ringheom;

TEST_CASE("ring parameter derived quantities at the default point") {
  RingParams ring;
  ring.validate();
  CHECK(ring.inertia() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ring.omega0() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ring.flux_quantum() == doctest::Approx(-2.0 * M_PI).epsilon(1e-15));
  ring.flux_bar = 0.25;
  CHECK(ring.gauge_momentum() == doctest::Approx(0.25).epsilon(1e-15));
  RingParams bad;
  bad.mass = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("grid shape and coordinates") {
  RingGrid g = make_grid(64, 31);
  CHECK(g.rows() == 63);
  CHECK(g.dtheta() == doctest::Approx(2.0 * M_PI / 64).epsilon(1e-15));
  CHECK(g.dp() == 0.5);
  CHECK(g.p(-31) == -15.5);
  CHECK(g.p(2) == 1.0);
  CHECK(g.row(-31) == 0);
  CHECK(g.row(31) == 62);
  CHECK_THROWS_AS(make_grid(7, 31), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, 31), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, 0), std::invalid_argument);
}

TEST_CASE("trace is the dp dtheta weighted sum and is linear") {
  RingGrid g = make_grid(16, 5);
  WignerField w(g);
  w.values.setConstant(1.0);
  CHECK(trace(w) == doctest::Approx(0.5 * 2.0 * M_PI * 11).epsilon(1e-13));

  WignerField u(g);
  u.values.setRandom();
  WignerField v(g);
  v.values.setRandom();
  WignerField sum(g);
  sum.values = 2.0 * u.values + v.values;
  CHECK(trace(sum) == doctest::Approx(2.0 * trace(u) + trace(v)).epsilon(1e-12));
}

TEST_CASE("delta_p stencil and hard-wall closure") {
  RingGrid g = make_grid(8, 3);
  WignerField w(g);
  for (int n = -3; n <= 3; ++n) w.values.row(g.row(n)).setConstant(double(n));
  WignerField d = delta_p(w);
  // interior: ((n+1) - (n-1)) / hbar = 2
  for (int n = -2; n <= 2; ++n) CHECK(d.values(g.row(n), 0) == doctest::Approx(2.0));
  // walls read zero outside
  CHECK(d.values(g.row(3), 0) == doctest::Approx(0.0 - 2.0));
  CHECK(d.values(g.row(-3), 0) == doctest::Approx(-2.0 - 0.0));
}

TEST_CASE("delta_p conserves the trace of interior-supported fields") {
  RingGrid g = make_grid(16, 9);
  WignerField w(g);
  w.values.setRandom();
  w.values.row(0).setZero();
  w.values.row(1).setZero();
  w.values.row(g.rows() - 1).setZero();
  w.values.row(g.rows() - 2).setZero();
  CHECK(std::abs(trace(delta_p(w))) < 1e-13);
}

TEST_CASE("angular derivative is exact on resolved harmonics up to the sinc factor") {
  RingGrid g = make_grid(64, 2);
  for (int m : {1, 2, 5}) {
    WignerField w(g);
    for (int j = 0; j < g.n_theta; ++j) w.values.col(j).setConstant(std::sin(m * g.theta(j)));
    WignerField d = dtheta_deriv(w);
    const double factor = std::sin(m * g.dtheta()) / g.dtheta();
    for (int j = 0; j < g.n_theta; ++j) {
      CHECK(d.values(0, j) == doctest::Approx(factor * std::cos(m * g.theta(j))).epsilon(1e-12));
    }
  }
}

TEST_CASE("angular derivative converges at second order") {
  auto err = [](int n_theta) {
    RingGrid g = make_grid(n_theta, 1);
    WignerField w(g);
    for (int j = 0; j < g.n_theta; ++j) {
      w.values.col(j).setConstant(std::exp(std::cos(g.theta(j))));
    }
    WignerField d = dtheta_deriv(w);
    double e = 0.0;
    for (int j = 0; j < g.n_theta; ++j) {
      const double exact = -std::sin(g.theta(j)) * std::exp(std::cos(g.theta(j)));
      e = std::max(e, std::abs(d.values(0, j) - exact));
    }
    return e;
  };
  const double e1 = err(32);
  const double e2 = err(64);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("angular derivative has zero trace on any field") {
  RingGrid g = make_grid(12, 4);
  WignerField w(g);
  w.values.setRandom();
  CHECK(std::abs(trace(dtheta_deriv(w))) < 1e-13);
}
