#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pelrec/pel_recursive.hpp"
#include "pelrec/synthetic.hpp"

namespace pelrec {

enum class NoiseTargets { kBothFrames, kCurrentOnly };

struct EmitSet {
  bool fields = true;
  bool error_images = true;
  bool metrics_csv = true;
  bool diagnostics_json = true;

  bool any() const { return fields || error_images || metrics_csv || diagnostics_json; }
};

/// Everything one experiment needs.
///
/// Text form is flat "key = value" lines with dotted keys; '#' starts a
/// comment. Recognized keys:
///
///   seed                        integer (PELREC_SEED overrides)
///   input.type                  synthetic | directory
///   input.directory             PGM directory, frames in lexicographic filename order
///   synthetic.rows / .cols      frame size
///   synthetic.pattern           smooth | textured | two-region
///   synthetic.motion            "dx,dy" or, for two-region, "dx1,dy1;dx2,dy2"
///   synthetic.boundary_col      two-region boundary column
///   synthetic.frames            frame count K
///   synthetic.amplitude         sinusoid amplitude of the smooth pattern
///   noise.snr_db                optional; absent means noiseless
///   noise.targets               both-frames | current-only
///   estimator.kind              em-single-mask | em-multi-mask | wiener
///   estimator.dfd_threshold_T   estimator.update_tol_eps   estimator.param_tol_xi
///   estimator.param_rtol_xi     estimator.max_iter_I       estimator.max_displacement
///   estimator.wiener_mu         estimator.wiener_multi_mask true | false
///   estimator.init_sets         "s1,s2,sn;s1,s2,sn;..."
///   estimator.include_all_masks true | false
///   estimator.temporal_prior    true | false (predict from the previous pair's field)
///   output.directory            artifact directory
///   output.emit                 comma list of fields, error-images, metrics-csv, diagnostics-json
struct RunConfig {
  std::optional<std::filesystem::path> input_directory;
  std::optional<SyntheticSpec> synthetic;
  std::optional<double> noise_snr_db;
  NoiseTargets noise_targets = NoiseTargets::kBothFrames;
  EstimatorConfig estimator;
  bool temporal_prior = false;
  std::filesystem::path output_directory = "out";
  EmitSet emit;
  std::uint64_t seed = 1;

  /// Throws ConfigError when the combination is unusable.
  void validate() const;
};

/// Relative paths are resolved against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies PELREC_SEED when set.
void apply_environment(RunConfig& config);

}  // namespace pelrec
