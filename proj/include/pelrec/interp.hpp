#pragma once

#include <optional>

#include "pelrec/frame.hpp"

namespace pelrec {

/// Sub-pixel location. Integer coordinates sit on pixel centers; x is the column.
struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// Spatial intensity gradient (per pixel).
struct Gradient2 {
  double gx = 0.0;
  double gy = 0.0;
};

inline bool in_bounds(const Frame& frame, Position pos) {
  return pos.x >= 0.0 && pos.y >= 0.0 && pos.x <= frame.cols() - 1 && pos.y <= frame.rows() - 1;
}

/// Bilinear interpolation over the enclosing 2x2 cell. Throws BoundsError.
double sample(const Frame& frame, Position pos);

/// Exact partial derivatives of the bilinear surface. On a cell edge the
/// lower-index cell is used, so at integer positions these are backward
/// differences (forward at the first row/column). Throws BoundsError.
Gradient2 gradient(const Frame& frame, Position pos);

/// Displaced frame difference current(r) - previous(r - d). Throws BoundsError
/// when r - d leaves `previous`.
double dfd(const Frame& current, const Frame& previous, Pixel r, Displacement d);

// Non-throwing variants for the estimation loops.
std::optional<double> try_sample(const Frame& frame, Position pos);
std::optional<double> try_dfd(const Frame& current, const Frame& previous, Pixel r,
                              Displacement d);

/// Sample and gradient at the same position, sharing the cell lookup. The
/// sample uses floor-cell selection and the gradient the lower-index rule.
struct SampleAndGradient {
  double value;
  Gradient2 grad;
};
std::optional<SampleAndGradient> try_sample_and_gradient(const Frame& frame, Position pos);

inline Position displaced(Pixel r, Displacement d) {
  return {static_cast<double>(r.col) - d.dx, static_cast<double>(r.row) - d.dy};
}

}  // namespace pelrec
