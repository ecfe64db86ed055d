#pragma once

#include <optional>
#include <vector>

#include "pelrec/frame.hpp"
#include "pelrec/interp.hpp"

namespace pelrec {

/// Neighborhood offset relative to the working pixel.
struct Offset {
  int dy = 0;
  int dx = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// A neighborhood template. Offsets lie in the 3x3 window and include the center.
struct Mask {
  int id = 0;
  std::vector<Offset> offsets;
};

/// Masks in trial order:
///   0      full 3x3 (N=9)
///   1, 2   top / bottom half, rows {-1,0} / {0,+1} (N=6)
///   3, 4   left / right half, cols {-1,0} / {0,+1} (N=6)
///   5..8   2x2 quadrants containing the center: top-left, top-right,
///          bottom-left, bottom-right (N=4)
/// Offsets are listed row-major within each mask.
const std::vector<Mask>& mask_catalog();

/// Linearized neighborhood system z = G u + n, one row per mask offset.
///
/// Row i of g is grad I_{k-1}(r_i - d_pred) and z_i = I_{k-1}(r_i - d_pred) - I_k(r_i),
/// i.e. the negated displaced frame difference. With that sign the update
/// u = d - d_pred enters with a plus: a first-order expansion of
/// I_k(r) = I_{k-1}(r - d) gives DFD = -grad^T u.
struct ObservationSystem {
  std::vector<Gradient2> g;
  std::vector<double> z;

  std::size_t n_obs() const noexcept { return z.size(); }
};

/// Builds the system around `r` for prediction `d_pred`. Returns nullopt if any
/// neighbor or its displaced position falls outside the frames.
std::optional<ObservationSystem> try_build_system(const Frame& current, const Frame& previous,
                                                  Pixel r, Displacement d_pred, const Mask& mask);

/// Throwing variant: BoundsError when the system is unbuildable.
ObservationSystem build_system(const Frame& current, const Frame& previous, Pixel r,
                               Displacement d_pred, const Mask& mask);

}  // namespace pelrec
