#include "ringheom/grid.hpp"

#include <stdexcept>

namespace ringheom {

void RingParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("RingParams: mass must be > 0");
  if (!(radius > 0.0)) throw std::invalid_argument("RingParams: radius must be > 0");
  if (charge == 0.0 || !std::isfinite(charge)) {
    throw std::invalid_argument("RingParams: charge must be nonzero and finite");
  }
  if (!std::isfinite(flux_bar)) throw std::invalid_argument("RingParams: flux_bar must be finite");
}

RingGrid make_grid(int n_theta, int n_max) {
  if (n_theta < 4 || n_theta % 2 != 0) {
    throw std::invalid_argument("make_grid: n_theta must be even and >= 4");
  }
  if (n_max < 1) throw std::invalid_argument("make_grid: n_max must be >= 1");
  return RingGrid{n_theta, n_max};
}

}  // namespace ringheom
