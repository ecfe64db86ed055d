#include "pelrec/wiener.hpp"

#include <cmath>
#include <stdexcept>

#include "pelrec/errors.hpp"

namespace pelrec {

Displacement wiener_estimate(const ObservationSystem& sys, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be >= 0");
  double sxx = 0.0, sxy = 0.0, syy = 0.0, bx = 0.0, by = 0.0;
  for (std::size_t i = 0; i < sys.n_obs(); ++i) {
    const Gradient2& g = sys.g[i];
    sxx += g.gx * g.gx;
    sxy += g.gx * g.gy;
    syy += g.gy * g.gy;
    bx += g.gx * sys.z[i];
    by += g.gy * sys.z[i];
  }
  const double h11 = sxx + mu;
  const double h22 = syy + mu;
  const double det = h11 * h22 - sxy * sxy;
  const double scale = h11 * h22;
  if (!std::isfinite(det) || !(det > 1e-14 * scale) || !(scale > 0.0)) {
    throw NumericError("singular normal equations in Wiener update");
  }
  return {(h22 * bx - sxy * by) / det, (h11 * by - sxy * bx) / det};
}

}  // namespace pelrec
