#include "pelrec/interp.hpp"

#include <algorithm>
#include <cmath>

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

struct Cell {
  int x0;
  int y0;
  double fx;
  double fy;
};

// Cell whose lower corner is floor(pos); the last row/column folds back one cell.
Cell floor_cell(const Frame& f, Position pos) {
  const int x0 = std::min(static_cast<int>(std::floor(pos.x)), f.cols() - 2);
  const int y0 = std::min(static_cast<int>(std::floor(pos.y)), f.rows() - 2);
  return {x0, y0, pos.x - x0, pos.y - y0};
}

// Cell containing pos with ties on cell edges going to the lower-index cell.
Cell lower_cell(const Frame& f, Position pos) {
  const int x0 = std::clamp(static_cast<int>(std::ceil(pos.x)) - 1, 0, f.cols() - 2);
  const int y0 = std::clamp(static_cast<int>(std::ceil(pos.y)) - 1, 0, f.rows() - 2);
  return {x0, y0, pos.x - x0, pos.y - y0};
}

double interpolate(const Frame& f, const Cell& c) {
  const double v00 = f(c.y0, c.x0);
  const double v01 = f(c.y0, c.x0 + 1);
  const double v10 = f(c.y0 + 1, c.x0);
  const double v11 = f(c.y0 + 1, c.x0 + 1);
  return (1.0 - c.fy) * ((1.0 - c.fx) * v00 + c.fx * v01) +
         c.fy * ((1.0 - c.fx) * v10 + c.fx * v11);
}

Gradient2 differentiate(const Frame& f, const Cell& c) {
  const double v00 = f(c.y0, c.x0);
  const double v01 = f(c.y0, c.x0 + 1);
  const double v10 = f(c.y0 + 1, c.x0);
  const double v11 = f(c.y0 + 1, c.x0 + 1);
  return {(1.0 - c.fy) * (v01 - v00) + c.fy * (v11 - v10),
          (1.0 - c.fx) * (v10 - v00) + c.fx * (v11 - v01)};
}

}  // namespace

std::optional<double> try_sample(const Frame& frame, Position pos) {
  if (!in_bounds(frame, pos)) return std::nullopt;
  return interpolate(frame, floor_cell(frame, pos));
}

double sample(const Frame& frame, Position pos) {
  if (!in_bounds(frame, pos)) throw BoundsError(pos.x, pos.y);
  return interpolate(frame, floor_cell(frame, pos));
}

Gradient2 gradient(const Frame& frame, Position pos) {
  if (!in_bounds(frame, pos)) throw BoundsError(pos.x, pos.y);
  return differentiate(frame, lower_cell(frame, pos));
}

std::optional<SampleAndGradient> try_sample_and_gradient(const Frame& frame, Position pos) {
  if (!in_bounds(frame, pos)) return std::nullopt;
  return SampleAndGradient{interpolate(frame, floor_cell(frame, pos)),
                           differentiate(frame, lower_cell(frame, pos))};
}

std::optional<double> try_dfd(const Frame& current, const Frame& previous, Pixel r,
                              Displacement d) {
  const auto prev = try_sample(previous, displaced(r, d));
  if (!prev) return std::nullopt;
  return current(r.row, r.col) - *prev;
}

double dfd(const Frame& current, const Frame& previous, Pixel r, Displacement d) {
  if (r.row < 0 || r.col < 0 || r.row >= current.rows() || r.col >= current.cols()) {
    throw BoundsError(r.col, r.row);
  }
  return current(r.row, r.col) - sample(previous, displaced(r, d));
}

}  // namespace pelrec
