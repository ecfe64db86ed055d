#include "pelrec/pel_recursive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pelrec/errors.hpp"
#include "pelrec/interp.hpp"
#include "pelrec/observation.hpp"

namespace pelrec {

namespace {

enum class TrialStatus { kConverged, kExhausted, kOutOfBounds };

struct TrialResult {
  TrialStatus status = TrialStatus::kExhausted;
  Displacement d;  // accepted vector, or the one that left the frame
  double abs_dfd = 0.0;
  int iterations = 0;
};

Displacement clamp_magnitude(Displacement d, double max_norm) {
  const double n = d.norm();
  if (n > max_norm) {
    const double s = max_norm / n;
    d.dx *= s;
    d.dy *= s;
  }
  return d;
}

bool uses_em(const EstimatorConfig& cfg) { return cfg.estimator != EstimatorKind::kWiener; }

// One mask trial from the original prediction: iterate
//   build system -> update -> d += u
// until the stopping tests pass or max_iter iterations have run.
TrialResult run_trial(const Frame& current, const Frame& previous, Pixel r, Displacement d0,
                      const Mask& mask, const EmParams& init, const EstimatorConfig& cfg,
                      std::vector<ObjectiveStep>* steps) {
  TrialResult trial;
  Displacement d = d0;
  EmParams phi = init;
  for (int p = 0; p < cfg.max_iter; ++p) {
    const auto sys = try_build_system(current, previous, r, d, mask);
    if (!sys) {
      trial.status = TrialStatus::kOutOfBounds;
      trial.d = d;
      return trial;
    }

    Displacement u;
    EmParams next = phi;
    double param_change = 0.0;
    double param_scale = 0.0;
    try {
      if (uses_em(cfg)) {
        const Posterior post = e_step(*sys, phi);
        u = post.c;
        next = m_step(post, sys->n_obs());
        param_change = param_distance(next, phi);
        param_scale = param_distance(phi, EmParams{0.0, 0.0, 0.0});
        if (steps) steps->push_back({objective(*sys, phi), objective(*sys, next)});
      } else {
        u = wiener_estimate(*sys, cfg.wiener_mu);
      }
    } catch (const NumericError&) {
      trial.status = TrialStatus::kExhausted;
      return trial;
    }
    ++trial.iterations;

    const Displacement d_next = clamp_magnitude(d + u, cfg.max_displacement);
    const auto residual = try_dfd(current, previous, r, d_next);
    if (!residual) {
      trial.status = TrialStatus::kOutOfBounds;
      trial.d = d_next;
      return trial;
    }

    const bool done = param_change <= cfg.param_tol + cfg.param_rtol * param_scale &&
                      (d_next - d).norm() <= cfg.update_tol &&
                      std::abs(*residual) < cfg.dfd_threshold;
    d = d_next;
    phi = next;
    if (done) {
      trial.status = TrialStatus::kConverged;
      trial.d = d;
      trial.abs_dfd = std::abs(*residual);
      return trial;
    }
  }
  trial.status = TrialStatus::kExhausted;
  return trial;
}

bool is_interior(const Frame& f, Pixel r) {
  return r.row >= 1 && r.col >= 1 && r.row <= f.rows() - 2 && r.col <= f.cols() - 2;
}

// Out-of-frame fallbacks were never verified against the data and are not
// used as predictions.
bool usable_prediction(const FieldEstimate& est, int row, int col) {
  const auto idx = static_cast<std::size_t>(row) * static_cast<std::size_t>(est.field.cols()) +
                   static_cast<std::size_t>(col);
  return est.pixels[idx].termination != Termination::kOutOfBoundsFallback;
}

}  // namespace

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "em-single-mask" || name == "em") return EstimatorKind::kEmSingleMask;
  if (name == "em-multi-mask" || name == "emm") return EstimatorKind::kEmMultiMask;
  if (name == "wiener") return EstimatorKind::kWiener;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kEmSingleMask: return "em-single-mask";
    case EstimatorKind::kEmMultiMask: return "em-multi-mask";
    case EstimatorKind::kWiener: return "wiener";
  }
  return "?";
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kDfdBelowThresholdAtInit: return "dfd-below-T-at-init";
    case Termination::kConverged: return "converged";
    case Termination::kExhaustedFallbackZero: return "exhausted-fallback-zero";
    case Termination::kOutOfBoundsFallback: return "out-of-bounds-fallback";
  }
  return "?";
}

void EstimatorConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(dfd_threshold > 0.0)) fail("dfd threshold T must be > 0");
  if (!(update_tol > 0.0)) fail("update tolerance epsilon must be > 0");
  if (!(param_tol > 0.0)) fail("parameter tolerance xi must be > 0");
  if (!(param_rtol >= 0.0)) fail("relative parameter tolerance must be >= 0");
  if (max_iter < 1) fail("max_iter I must be >= 1");
  if (!(max_displacement >= 1.0)) fail("max_displacement must be >= 1");
  if (!(wiener_mu >= 0.0)) fail("wiener mu must be >= 0");
  if (uses_em(*this) && init_sets.empty()) fail("EM needs at least one initial parameter set");
  for (const auto& p : init_sets) {
    if (!(p.sigma1_sq >= kVarianceFloor) || !(p.sigma2_sq >= kVarianceFloor) ||
        !(p.sigman_sq >= kVarianceFloor) || !std::isfinite(p.sigma1_sq) ||
        !std::isfinite(p.sigma2_sq) || !std::isfinite(p.sigman_sq)) {
      fail("initial variances must be finite and >= the variance floor");
    }
  }
}

PixelEstimate estimate_pixel(const Frame& current, const Frame& previous, Pixel r,
                             Displacement d0, const EstimatorConfig& cfg) {
  PixelEstimate out;
  PixelDiagnostics& diag = out.diagnostics;
  diag.estimated = true;
  d0 = clamp_magnitude(d0, cfg.max_displacement);

  if (const auto initial = try_dfd(current, previous, r, d0);
      initial && std::abs(*initial) < cfg.dfd_threshold) {
    out.d = d0;
    diag.termination = Termination::kDfdBelowThresholdAtInit;
    diag.final_abs_dfd = std::abs(*initial);
    return out;
  }

  const auto& catalog = mask_catalog();
  const bool multi = cfg.estimator == EstimatorKind::kEmMultiMask ||
                     (cfg.estimator == EstimatorKind::kWiener && cfg.wiener_multi_mask);
  const std::size_t mask_count = multi ? catalog.size() : 1;
  static const std::vector<EmParams> kNoParams{EmParams{}};
  const std::vector<EmParams>& inits = uses_em(cfg) ? cfg.init_sets : kNoParams;
  std::vector<ObjectiveStep>* steps = cfg.record_objective ? &diag.objective_steps : nullptr;

  bool full_mask_exhausted = false;
  std::optional<Displacement> left_frame;
  std::optional<TrialResult> best;
  for (std::size_t m = 0; m < mask_count; ++m) {
    ++diag.masks_tried;
    std::optional<TrialResult> accepted;
    for (const EmParams& init : inits) {
      const TrialResult trial = run_trial(current, previous, r, d0, catalog[m], init, cfg, steps);
      diag.em_iterations_total += trial.iterations;
      if (trial.status == TrialStatus::kConverged) {
        accepted = trial;
        break;
      }
      if (m > 0) continue;
      if (trial.status == TrialStatus::kExhausted) full_mask_exhausted = true;
      if (trial.status == TrialStatus::kOutOfBounds && !left_frame) left_frame = trial.d;
    }
    if (!accepted) continue;
    if (!best || accepted->abs_dfd < best->abs_dfd) {
      best = accepted;
      diag.accepted_mask = catalog[m].id;
    }
    if (m == 0 || !cfg.include_all_masks) break;
  }

  if (best) {
    out.d = best->d;
    diag.termination = Termination::kConverged;
    diag.final_abs_dfd = best->abs_dfd;
    return out;
  }

  // The full mask decides the fallback, so multi-mask only departs from
  // single-mask where a fallback mask converged. If every full-mask trial left
  // the frame, keep the first out-of-frame vector, which marks the pixel as
  // uncompensable. Otherwise fall back to zero motion.
  if (!full_mask_exhausted && left_frame) {
    out.d = *left_frame;
    diag.termination = Termination::kOutOfBoundsFallback;
  } else {
    out.d = Displacement{};
    diag.termination = Termination::kExhaustedFallbackZero;
  }
  const auto final_dfd = try_dfd(current, previous, r, out.d);
  diag.final_abs_dfd = final_dfd ? std::abs(*final_dfd) : 0.0;
  return out;
}

FieldSummary summarize(const std::vector<PixelDiagnostics>& pixels,
                       const std::function<bool(std::size_t)>& include) {
  FieldSummary s;
  double masks = 0.0, iters = 0.0, abs_dfd = 0.0;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const PixelDiagnostics& p = pixels[i];
    if (!p.estimated || (include && !include(i))) continue;
    ++s.pixels_estimated;
    masks += p.masks_tried;
    iters += p.em_iterations_total;
    abs_dfd += p.final_abs_dfd;
    s.max_em_iterations = std::max(s.max_em_iterations, p.em_iterations_total);
    switch (p.termination) {
      case Termination::kDfdBelowThresholdAtInit: ++s.below_threshold_at_init; break;
      case Termination::kConverged: ++s.converged; break;
      case Termination::kExhaustedFallbackZero: ++s.exhausted_fallback; break;
      case Termination::kOutOfBoundsFallback: ++s.out_of_bounds_fallback; break;
    }
  }
  if (s.pixels_estimated > 0) {
    const double n = s.pixels_estimated;
    s.mean_masks_tried = masks / n;
    s.mean_em_iterations = iters / n;
    s.mean_abs_dfd = abs_dfd / n;
    s.fallback_rate = (s.exhausted_fallback + s.out_of_bounds_fallback) / n;
  }
  return s;
}

FieldEstimate estimate_field(const Frame& current, const Frame& previous,
                             const EstimatorConfig& cfg, const MotionField* prior_field) {
  if (!current.same_shape(previous)) {
    throw std::invalid_argument("frames differ in size: " + std::to_string(current.rows()) + "x" +
                                std::to_string(current.cols()) + " vs " +
                                std::to_string(previous.rows()) + "x" +
                                std::to_string(previous.cols()));
  }
  if (prior_field && !prior_field->matches(current)) {
    throw std::invalid_argument("prior motion field does not match the frame size");
  }
  cfg.validate();

  const int rows = current.rows();
  const int cols = current.cols();
  FieldEstimate out{MotionField(rows, cols),
                    std::vector<PixelDiagnostics>(static_cast<std::size_t>(rows) *
                                                  static_cast<std::size_t>(cols)),
                    {}};
  if (rows < 3 || cols < 3) return out;

  for (int row = 1; row <= rows - 2; ++row) {
    for (int col = 1; col <= cols - 2; ++col) {
      const Pixel r{row, col};
      Displacement d0;
      if (prior_field) {
        d0 = prior_field->at(r);
      } else if (col > 1 && usable_prediction(out, row, col - 1)) {
        d0 = out.field.at(row, col - 1);
      } else if (row > 1 && usable_prediction(out, row - 1, col)) {
        d0 = out.field.at(row - 1, col);
      }
      PixelEstimate est = estimate_pixel(current, previous, r, d0, cfg);
      out.field.at(r) = est.d;
      out.pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(col)] = std::move(est.diagnostics);
    }
  }

  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      if (is_interior(current, {row, col})) continue;
      out.field.at(row, col) =
          out.field.at(std::clamp(row, 1, rows - 2), std::clamp(col, 1, cols - 2));
    }
  }

  out.summary = summarize(out.pixels);
  return out;
}

}  // namespace pelrec
