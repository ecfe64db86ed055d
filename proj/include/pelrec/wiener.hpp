#pragma once

#include "pelrec/frame.hpp"
#include "pelrec/observation.hpp"

namespace pelrec {

inline constexpr double kDefaultWienerMu = 50.0;

/// Regularized least-squares update (G^T G + mu I)^-1 G^T z.
/// Throws NumericError when mu == 0 and G^T G is singular, std::invalid_argument for mu < 0.
Displacement wiener_estimate(const ObservationSystem& sys, double mu);

}  // namespace pelrec
