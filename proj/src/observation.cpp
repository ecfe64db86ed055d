#include "pelrec/observation.hpp"

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

Mask rect_mask(int id, int row_lo, int row_hi, int col_lo, int col_hi) {
  Mask m{id, {}};
  for (int dy = row_lo; dy <= row_hi; ++dy) {
    for (int dx = col_lo; dx <= col_hi; ++dx) m.offsets.push_back({dy, dx});
  }
  return m;
}

std::vector<Mask> make_catalog() {
  return {
      rect_mask(0, -1, 1, -1, 1),
      rect_mask(1, -1, 0, -1, 1),
      rect_mask(2, 0, 1, -1, 1),
      rect_mask(3, -1, 1, -1, 0),
      rect_mask(4, -1, 1, 0, 1),
      rect_mask(5, -1, 0, -1, 0),
      rect_mask(6, -1, 0, 0, 1),
      rect_mask(7, 0, 1, -1, 0),
      rect_mask(8, 0, 1, 0, 1),
  };
}

}  // namespace

const std::vector<Mask>& mask_catalog() {
  static const std::vector<Mask> catalog = make_catalog();
  return catalog;
}

std::optional<ObservationSystem> try_build_system(const Frame& current, const Frame& previous,
                                                  Pixel r, Displacement d_pred, const Mask& mask) {
  ObservationSystem sys;
  sys.g.reserve(mask.offsets.size());
  sys.z.reserve(mask.offsets.size());
  for (const Offset& o : mask.offsets) {
    const Pixel ri{r.row + o.dy, r.col + o.dx};
    if (ri.row < 0 || ri.col < 0 || ri.row >= current.rows() || ri.col >= current.cols()) {
      return std::nullopt;
    }
    const auto sg = try_sample_and_gradient(previous, displaced(ri, d_pred));
    if (!sg) return std::nullopt;
    // Negated DFD, so that z = G (d_true - d_pred) with G rows = +grad.
    sys.z.push_back(sg->value - current(ri.row, ri.col));
    sys.g.push_back(sg->grad);
  }
  return sys;
}

ObservationSystem build_system(const Frame& current, const Frame& previous, Pixel r,
                               Displacement d_pred, const Mask& mask) {
  auto sys = try_build_system(current, previous, r, d_pred, mask);
  if (!sys) {
    const Position p = displaced(r, d_pred);
    throw BoundsError(p.x, p.y);
  }
  return std::move(*sys);
}

}  // namespace pelrec
