#pragma once

#include "ringheom/dynamics_cl.hpp"
#include "ringheom/dynamics_risb.hpp"
#include "ringheom/integrate.hpp"

namespace ringheom {

// Constraint rows for the bordered steady-state solve. Every generator
// conserves the trace, so one operator row is redundant and gets replaced by
// the unit-trace normalization. When nothing couples neighboring angle
// columns except advection (which cancels on the alternating-sign harmonic)
// and the momentum stencil never mixes parities, the alternating column mass
// is a second conserved quantity and needs its own row. The stack generator
// additionally decouples the odd momentum sublattice from the even one at the
// theta-averaged level, so its solve pins the odd-sublattice mass and
// alternating mass as well; all pinned values are exact for the physical
// state (populations live on even momentum rows only).
std::vector<LinearConstraint> steady_constraints(const RisbMarkovianGenerator& gen);
std::vector<LinearConstraint> steady_constraints(const CLMarkovianGenerator& gen);
std::vector<LinearConstraint> steady_constraints(const RisbGenerator& gen);

// Unit-trace steady state via the bordered solve; residual_out (if given)
// receives ||L x|| / ||x|| against the unmodified generator.
WignerField steady_state(const RisbMarkovianGenerator& gen, const SteadyStateOptions& opts = {},
                         double* residual_out = nullptr);
CLField steady_state(const CLMarkovianGenerator& gen, const SteadyStateOptions& opts = {},
                     double* residual_out = nullptr);
AdoStack steady_state(const RisbGenerator& gen, const SteadyStateOptions& opts = {},
                      double* residual_out = nullptr);

}  // namespace ringheom
