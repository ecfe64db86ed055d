#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pelrec/frame.hpp"

namespace pelrec {

enum class SyntheticPattern {
  kSmoothRampSinusoid,  // "smooth"
  kTexturedNoise,       // "textured"
  kTwoRegion,           // "two-region"
};

SyntheticPattern parse_pattern(std::string_view name);
std::string_view pattern_name(SyntheticPattern pattern);

/// Ground-truth sequence description.
///
/// For kTwoRegion, `motions` holds two vectors: columns left of
/// `boundary_col` move by motions[0], the rest by motions[1]. The boundary is
/// fixed in image coordinates. The other patterns take a single vector.
struct SyntheticSpec {
  int rows = 64;
  int cols = 64;
  SyntheticPattern pattern = SyntheticPattern::kSmoothRampSinusoid;
  std::vector<Displacement> motions{Displacement{1.0, 0.5}};
  int boundary_col = 32;
  int frame_count = 2;
  std::uint64_t seed = 1;
  /// Sinusoid amplitude of the smooth pattern; 0 leaves a pure linear ramp.
  double sinusoid_amplitude = 45.0;

  /// Throws std::invalid_argument when the description is inconsistent.
  void validate(double max_displacement) const;
};

/// Analytic intensity of the smooth pattern at a (possibly fractional) point.
double smooth_pattern_value(const SyntheticSpec& spec, double x, double y);

/// Frame 0 is rendered from the pattern; frame k is frame k-1 resampled at
/// r - d(r) with the same bilinear interpolation used by `sample`, so the
/// displaced frame difference at the true motion vanishes.
std::vector<Frame> generate_sequence(const SyntheticSpec& spec);

/// Ground-truth displacement at a pixel.
Displacement true_motion(const SyntheticSpec& spec, Pixel r);

}  // namespace pelrec
