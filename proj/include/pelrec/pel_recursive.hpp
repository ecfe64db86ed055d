#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pelrec/em.hpp"
#include "pelrec/frame.hpp"
#include "pelrec/motion_field.hpp"
#include "pelrec/wiener.hpp"

namespace pelrec {

enum class EstimatorKind {
  kEmSingleMask,  // "em-single-mask": full 3x3 mask only
  kEmMultiMask,   // "em-multi-mask": whole mask catalog
  kWiener,        // "wiener": ridge update, full mask unless wiener_multi_mask
};

EstimatorKind parse_estimator(std::string_view name);
std::string_view estimator_name(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind estimator = EstimatorKind::kEmMultiMask;
  double dfd_threshold = 3.0;      // T, gray levels
  double update_tol = 0.01;        // epsilon, pixels
  double param_tol = 1e-4;         // xi, absolute part
  double param_rtol = 1e-2;        // relative part: |dPhi| <= xi + rtol * |Phi|
  int max_iter = 10;               // I, per mask trial
  double max_displacement = 5.0;   // pixels
  std::vector<EmParams> init_sets{EmParams{1.0, 1.0, 1.0}, EmParams{25.0, 25.0, 100.0}};
  /// When the full mask fails, run every remaining mask and keep the
  /// converged one with the smallest final |DFD|. Otherwise the first
  /// converged mask in catalog order wins.
  bool include_all_masks = true;
  double wiener_mu = kDefaultWienerMu;
  /// Wiener walks the whole mask catalog like em-multi-mask; off gives the
  /// single full-mask baseline.
  bool wiener_multi_mask = false;
  /// Record the objective before/after every M-step (diagnostics only).
  bool record_objective = false;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

enum class Termination {
  kDfdBelowThresholdAtInit,
  kConverged,
  kExhaustedFallbackZero,
  kOutOfBoundsFallback,
};

std::string_view termination_name(Termination t);

/// Objective of the system built at one iteration, evaluated at the
/// parameters entering and leaving that iteration's M-step.
struct ObjectiveStep {
  double before = 0.0;
  double after = 0.0;
};

struct PixelDiagnostics {
  bool estimated = false;  // false for border pixels copied from the interior
  int masks_tried = 0;
  int em_iterations_total = 0;
  int accepted_mask = -1;
  double final_abs_dfd = 0.0;
  Termination termination = Termination::kDfdBelowThresholdAtInit;
  std::vector<ObjectiveStep> objective_steps;
};

struct PixelEstimate {
  Displacement d;
  PixelDiagnostics diagnostics;
};

/// Pel-recursive estimate for one interior pixel starting from prediction d0.
/// When every mask trial exhausts its iterations the result is (0, 0); when
/// every trial leaves the frame the first out-of-frame iterate is returned.
PixelEstimate estimate_pixel(const Frame& current, const Frame& previous, Pixel r,
                             Displacement d0, const EstimatorConfig& cfg);

struct FieldSummary {
  int pixels_estimated = 0;
  int below_threshold_at_init = 0;
  int converged = 0;
  int exhausted_fallback = 0;
  int out_of_bounds_fallback = 0;
  double mean_masks_tried = 0.0;
  double mean_em_iterations = 0.0;
  int max_em_iterations = 0;
  double fallback_rate = 0.0;
  double mean_abs_dfd = 0.0;
};

struct FieldEstimate {
  MotionField field;
  std::vector<PixelDiagnostics> pixels;  // raster order, full frame
  FieldSummary summary;
};

/// Raster-scan estimation. Each interior pixel is predicted from its left
/// neighbor (from the pixel above at the start of a row, or when the left
/// neighbor ended in the out-of-frame fallback), or from `prior_field` when
/// one is supplied. Border pixels copy the nearest
/// interior vector. Throws std::invalid_argument on shape mismatch.
FieldEstimate estimate_field(const Frame& current, const Frame& previous,
                             const EstimatorConfig& cfg,
                             const MotionField* prior_field = nullptr);

/// Summary over estimated pixels; `include` filters by raster index when set.
FieldSummary summarize(const std::vector<PixelDiagnostics>& pixels,
                       const std::function<bool(std::size_t)>& include = {});

}  // namespace pelrec
