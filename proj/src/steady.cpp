#include "ringheom/steady.hpp"

namespace ringheom {

namespace {

// trace row: dp dtheta sum x = 1, anchored at (n = 0, j = 0)
LinearConstraint trace_row(std::int64_t n_points, double cell, std::int64_t anchor) {
  LinearConstraint c;
  c.weights.reserve(n_points);
  for (std::int64_t i = 0; i < n_points; ++i) c.weights.emplace_back(i, cell);
  c.rhs = 1.0;
  c.replace_row = anchor;
  return c;
}

// alternating column mass: sum_j (-1)^j sum_r x(r, j) = 0, anchored at
// (n = 0, j = 1)
LinearConstraint nyquist_row(std::int64_t rows, std::int64_t cols, std::int64_t anchor) {
  LinearConstraint c;
  c.weights.reserve(rows * cols);
  for (std::int64_t j = 0; j < cols; ++j) {
    const double s = (j % 2 == 0) ? 1.0 : -1.0;
    for (std::int64_t r = 0; r < rows; ++r) c.weights.emplace_back(j * rows + r, s);
  }
  c.rhs = 0.0;
  c.replace_row = anchor;
  return c;
}

}  // namespace

std::vector<LinearConstraint> steady_constraints(const RisbMarkovianGenerator& gen) {
  const RingGrid& g = gen.grid();
  const std::int64_t rows = g.rows();
  const double cell = g.dp() * g.dtheta();
  return {trace_row(gen.dimension(), cell, g.row(0)), nyquist_row(rows, g.n_theta, rows + g.row(0))};
}

std::vector<LinearConstraint> steady_constraints(const CLMarkovianGenerator& gen) {
  const CLGrid& g = gen.grid();
  const double cell = g.dp * g.dtheta();
  return {trace_row(gen.dimension(), cell, g.n_p / 2),
          nyquist_row(g.n_p, g.n_theta, g.n_p + g.n_p / 2)};
}

std::vector<LinearConstraint> steady_constraints(const RisbGenerator& gen) {
  const RingGrid& g = gen.grid();
  const std::int64_t rows = g.rows();
  const double cell = g.dp() * g.dtheta();
  // Populations live at integer angular momentum, i.e. even momentum rows;
  // odd rows hold inter-level coherences whose theta-averaged content is
  // empty in equilibrium, and the theta-Nyquist harmonic is likewise absent.
  // Those sectors are (near) invariant under the generator, so without pins
  // the solver is free to add arbitrary amounts of them. All three pins are
  // satisfied exactly by the physical state.
  std::vector<LinearConstraint> cons;
  cons.push_back(trace_row(rows * g.n_theta, cell, g.row(0)));
  cons.push_back(nyquist_row(rows, g.n_theta, rows + g.row(0)));
  LinearConstraint odd_mass;      // theta-summed mass on odd momentum rows
  LinearConstraint odd_nyquist;   // theta-alternating sum on odd momentum rows
  for (std::int64_t j = 0; j < g.n_theta; ++j) {
    const double ts = (j % 2 == 0) ? 1.0 : -1.0;
    for (std::int64_t r = 0; r < rows; ++r) {
      const std::int64_t n = r - (rows - 1) / 2;
      if (n % 2 == 0) continue;
      odd_mass.weights.emplace_back(j * rows + r, 1.0);
      odd_nyquist.weights.emplace_back(j * rows + r, ts);
    }
  }
  odd_mass.rhs = 0.0;
  odd_mass.replace_row = g.row(1);
  odd_nyquist.rhs = 0.0;
  odd_nyquist.replace_row = rows + g.row(1);
  cons.push_back(std::move(odd_mass));
  cons.push_back(std::move(odd_nyquist));
  return cons;
}

namespace {

template <typename Gen>
SteadyStateResult solve(const Gen& gen, const SteadyStateOptions& opts) {
  return implicit_steady_state(
      gen.dimension(), [&](const std::function<void(std::int64_t, std::int64_t, double)>& sink) {
        gen.for_each_term(sink);
      },
      steady_constraints(gen), opts);
}

}  // namespace

WignerField steady_state(const RisbMarkovianGenerator& gen, const SteadyStateOptions& opts,
                         double* residual_out) {
  SteadyStateResult res = solve(gen, opts);
  if (residual_out) *residual_out = res.residual;
  WignerField w(gen.grid());
  w.values = Eigen::Map<const Eigen::ArrayXXd>(res.solution.data(), w.values.rows(),
                                               w.values.cols());
  return w;
}

CLField steady_state(const CLMarkovianGenerator& gen, const SteadyStateOptions& opts,
                     double* residual_out) {
  SteadyStateResult res = solve(gen, opts);
  if (residual_out) *residual_out = res.residual;
  CLField w(gen.grid());
  w.values = Eigen::Map<const Eigen::ArrayXXd>(res.solution.data(), w.values.rows(),
                                               w.values.cols());
  return w;
}

AdoStack steady_state(const RisbGenerator& gen, const SteadyStateOptions& opts,
                      double* residual_out) {
  SteadyStateResult res = solve(gen, opts);
  if (residual_out) *residual_out = res.residual;
  AdoStack stack(gen.space_ptr(), gen.grid());
  stack.data = res.solution;
  return stack;
}

}  // namespace ringheom
