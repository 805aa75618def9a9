#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ringheom/dynamics_cl.hpp"
#include "ringheom/dynamics_risb.hpp"
#include "ringheom/integrate.hpp"

namespace ringheom {

// Marginal of a phase-space state over the angle. For the ring lattice the
// weights are probabilities attached to integer momentum labels; for the
// continuous grid they are densities integrating to one with the p measure.
struct MomentumDistribution {
  Eigen::ArrayXi n;       // empty for continuous grids
  Eigen::ArrayXd p;
  Eigen::ArrayXd weight;
  double min_weight = 0.0;

  double mean() const;
  double variance() const;
};

// (1/2) integral dtheta per momentum row; input must carry unit trace to 1e-4,
// the output is renormalized exactly. Weights below -1e-10 are rejected.
MomentumDistribution momentum_distribution(const WignerField& w);
MomentumDistribution momentum_distribution(const CLField& w);

// Thermal density exp(-beta (p - a)^2 / (2 I_S)) sampled on the grid rows and
// normalized so that sum * dp = 1.
Eigen::ArrayXd gaussian_reference(const CLGrid& grid, const RingParams& ring, double beta);

struct ResponseSeries {
  Eigen::ArrayXd t;      // uniform sample times starting at 0
  Eigen::ArrayXd value;  // cos-theta moment of the kicked state
};

// Impulse response of the orientation moment: verifies the input is
// stationary (relative sup residual < 1e-6), applies the kick
// W' = sin(theta) d/dp W to every field, propagates, and samples
// m(t) = dp dtheta sum cos(theta) W'(primary) on a uniform time grid.
ResponseSeries linear_response(const AdoStack& eq, const RisbGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts = {});
ResponseSeries linear_response(const WignerField& eq, const RisbMarkovianGenerator& gen,
                               double t_max, double dt_sample, const Rkf45Options& opts = {});
ResponseSeries linear_response(const CLStack& eq, const CLGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts = {});
ResponseSeries linear_response(const CLField& eq, const CLMarkovianGenerator& gen, double t_max,
                               double dt_sample, const Rkf45Options& opts = {});

struct SpectrumResult {
  Eigen::ArrayXd omega;   // uniform, from 0 to the Nyquist frequency
  Eigen::ArrayXd sigma;   // Im of the windowed half-line Fourier transform
  double damping = 0.0;
  double t_max = 0.0;
  ResponseSeries r1;
};

// sigma(omega) = Im sum_m dt e^{i omega t_m} R(t_m) e^{-damping t_m}, zero
// padded to a fine uniform omega grid.
SpectrumResult spectrum(const ResponseSeries& r1, double damping);

inline double default_damping(double t_max) { return 2.0 * M_PI / t_max; }

struct Peak {
  double omega;
  double height;
};

// Local maxima of sigma at least min_frac of the global maximum.
std::vector<Peak> find_peaks(const SpectrumResult& s, double min_frac);

// J = dp dtheta (2 omega0 / Phi0) sum (p_n - a) W(p_n, theta). The caller
// reports how much the state still moved per unit time when relaxation
// stopped; a drift at or above 1e-9 is rejected as non-equilibrated.
double persistent_current(const WignerField& w, const RingParams& ring,
                          double equilibration_delta = 0.0);

struct CurrentSweep {
  Eigen::ArrayXd phi_bar;  // strictly increasing
  Eigen::ArrayXd current;
  double eta = 0.0;
  double beta = 0.0;
  int K = 0;
  int n_trunc = 0;

  void validate() const;
};

// Free-ring level at integer angular momentum n: hbar omega0 (n - flux)^2.
double eigenenergy(int n, const RingParams& ring);

// Byers-Yang level current (2 hbar omega0 / Phi0)(n - flux).
double byers_yang_current(int n, const RingParams& ring);

// Boltzmann-weighted level current over n in [-n_range, n_range]; the
// weak-coupling analytic reference for the equilibrium current.
double byers_yang_thermal_current(const RingParams& ring, double beta, int n_range = 20);

// Energy of the transition sign*|n| -> sign*(|n| + 1):
// hbar omega0 (2|n| + 1 - 2 sign flux).
double transition_energy(int n, int sign, const RingParams& ring);

}  // namespace ringheom
