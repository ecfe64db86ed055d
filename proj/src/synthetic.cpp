#include "pelrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "pelrec/interp.hpp"

namespace pelrec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Frame box_blur(const Frame& in) {
  Frame out(in.rows(), in.cols());
  for (int r = 0; r < in.rows(); ++r) {
    for (int c = 0; c < in.cols(); ++c) {
      double acc = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = std::clamp(r + dr, 0, in.rows() - 1);
          const int cc = std::clamp(c + dc, 0, in.cols() - 1);
          acc += in(rr, cc);
        }
      }
      out(r, c) = acc / 9.0;
    }
  }
  return out;
}

Frame textured_canvas(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Frame canvas(rows, cols);
  for (double& v : canvas.data()) v = uni(rng);
  for (int pass = 0; pass < 3; ++pass) canvas = box_blur(canvas);

  double mean = 0.0;
  for (double v : canvas.data()) mean += v;
  mean /= static_cast<double>(canvas.size());
  const double sd = std::sqrt(variance(canvas));
  for (double& v : canvas.data()) v = std::clamp(128.0 + 40.0 * (v - mean) / sd, 5.0, 250.0);
  return canvas;
}

}  // namespace

SyntheticPattern parse_pattern(std::string_view name) {
  if (name == "smooth" || name == "smooth-ramp-plus-sinusoid") {
    return SyntheticPattern::kSmoothRampSinusoid;
  }
  if (name == "textured" || name == "textured-noise-smoothed") {
    return SyntheticPattern::kTexturedNoise;
  }
  if (name == "two-region") return SyntheticPattern::kTwoRegion;
  throw std::invalid_argument("unknown synthetic pattern '" + std::string(name) + "'");
}

std::string_view pattern_name(SyntheticPattern pattern) {
  switch (pattern) {
    case SyntheticPattern::kSmoothRampSinusoid: return "smooth";
    case SyntheticPattern::kTexturedNoise: return "textured";
    case SyntheticPattern::kTwoRegion: return "two-region";
  }
  return "?";
}

void SyntheticSpec::validate(double max_displacement) const {
  if (rows < 2 || cols < 2) throw std::invalid_argument("synthetic frame must be at least 2x2");
  if (frame_count < 2) throw std::invalid_argument("synthetic sequence needs at least 2 frames");
  const std::size_t expected = pattern == SyntheticPattern::kTwoRegion ? 2 : 1;
  if (motions.size() != expected) {
    throw std::invalid_argument("pattern '" + std::string(pattern_name(pattern)) + "' needs " +
                                std::to_string(expected) + " motion vector(s)");
  }
  for (const auto& m : motions) {
    if (!std::isfinite(m.dx) || !std::isfinite(m.dy) || std::abs(m.dx) > max_displacement ||
        std::abs(m.dy) > max_displacement) {
      throw std::invalid_argument("synthetic motion component exceeds max displacement");
    }
  }
  if (pattern == SyntheticPattern::kTwoRegion && (boundary_col < 1 || boundary_col >= cols)) {
    throw std::invalid_argument("two-region boundary column must lie inside the frame");
  }
}

double smooth_pattern_value(const SyntheticSpec& spec, double x, double y) {
  const double ramp = 80.0 + 60.0 * x / spec.cols + 40.0 * y / spec.rows;
  const double a = spec.sinusoid_amplitude;
  const double wave = 0.4 * std::sin(kTwoPi * x / 11.0 + 0.3) +
                      0.4 * std::sin(kTwoPi * y / 9.0 + 1.1) +
                      0.2 * std::sin(kTwoPi * (x + y) / 14.0 + 0.5);
  return ramp + a * wave;
}

Displacement true_motion(const SyntheticSpec& spec, Pixel r) {
  if (spec.pattern == SyntheticPattern::kTwoRegion) {
    return r.col < spec.boundary_col ? spec.motions.at(0) : spec.motions.at(1);
  }
  return spec.motions.at(0);
}

std::vector<Frame> generate_sequence(const SyntheticSpec& spec) {
  double max_component = 0.0;
  for (const auto& m : spec.motions) {
    max_component = std::max({max_component, std::abs(m.dx), std::abs(m.dy)});
  }
  spec.validate(std::max(max_component, 1.0));

  // Work on a padded canvas so that edge effects of the resampling never
  // reach the cropped frames.
  const int margin = static_cast<int>(std::ceil((spec.frame_count - 1) * max_component)) + 2;
  const int prow = spec.rows + 2 * margin;
  const int pcol = spec.cols + 2 * margin;

  Frame canvas(prow, pcol);
  if (spec.pattern == SyntheticPattern::kSmoothRampSinusoid) {
    for (int r = 0; r < prow; ++r) {
      for (int c = 0; c < pcol; ++c) {
        canvas(r, c) = smooth_pattern_value(spec, c - margin, r - margin);
      }
    }
  } else {
    canvas = textured_canvas(prow, pcol, spec.seed);
  }

  auto crop = [&](const Frame& padded) {
    Frame out(spec.rows, spec.cols);
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) out(r, c) = padded(r + margin, c + margin);
    }
    return out;
  };

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(spec.frame_count));
  frames.push_back(crop(canvas));
  for (int k = 1; k < spec.frame_count; ++k) {
    Frame next(prow, pcol);
    for (int r = 0; r < prow; ++r) {
      for (int c = 0; c < pcol; ++c) {
        const Displacement d = true_motion(spec, Pixel{r - margin, c - margin});
        const Position p{std::clamp(c - d.dx, 0.0, pcol - 1.0),
                         std::clamp(r - d.dy, 0.0, prow - 1.0)};
        next(r, c) = sample(canvas, p);
      }
    }
    canvas = std::move(next);
    frames.push_back(crop(canvas));
  }
  return frames;
}

}  // namespace pelrec
